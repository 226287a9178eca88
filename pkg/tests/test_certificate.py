import copy
import random
from fractions import Fraction

import pytest

from decaykit.builtin import builtin_cable_certificate, builtin_certificate_json
from decaykit.certificate import (
    CertificateFormatError,
    ConclusionRefused,
    DecayCertificate,
    GridError,
    conclude_decay,
    verify_derivation,
)
from decaykit.mutation import mutate_certificate
from decaykit.slopes import WindowVerdict, ZZOrder, decayed_window_check, reduce_slope, slope_sign
from decaykit.words import Word


def verify_json(data, grid=3):
    return verify_derivation(DecayCertificate.from_json(data), grid)


def leaf(data, leaf_id):
    return next(b for b in data["branches"] if b["id"] == leaf_id)


def judgment(data, jid):
    return next(j for j in data["judgments"] if j["id"] == jid)


@pytest.mark.parametrize("p,q,r", [(2, 3, 1), (3, 5, 1), (5, 7, 1), (4, 9, 2), (3, 10, Fraction(5, 2))])
def test_builtin_accepts(p, q, r):
    report = verify_derivation(builtin_cable_certificate(p, q, r), 3)
    assert report.verdict == "ACCEPT", report.failures[:3]
    assert conclude_decay(report).decay == p * q


def test_trefoil_companion_wider_grid():
    cert = builtin_cable_certificate(2, 3, 1)
    report = verify_derivation(cert, {"k": (0, 6), "N": (1, 6)})
    assert report.accepted
    assert "6-decayed" in conclude_decay(report).notes


def test_leaf_info_for_3_5():
    data = builtin_certificate_json(3, 5, 1)
    ns = [b["info"]["n"] for b in data["branches"] if b.get("info", {}).get("n") is not None]
    assert ns == [2]


def test_inapplicable():
    with pytest.raises(ValueError, match="inapplicable: 7/2 <= 5"):
        builtin_certificate_json(2, 7, 5)


def test_grid_zero_is_grid_limited_accept():
    report = verify_derivation(builtin_cable_certificate(2, 11, 5), 0)
    assert report.verdict == "ACCEPT"
    out = report.to_json()
    assert out["grid_limited"] is True
    assert out["grid"] == {"N": [1, 1], "k": [0, 0]}


def test_bad_grids():
    cert = builtin_cable_certificate(2, 3, 1)
    with pytest.raises(GridError):
        verify_derivation(cert, -1)
    with pytest.raises(GridError):
        verify_derivation(cert, {"k": (0, 2)})
    with pytest.raises(GridError):
        verify_derivation(cert, {"k": (0, 2), "N": (0, 2)})


def test_non_increasing_sequence_rejected():
    data = builtin_certificate_json(2, 3, 1)
    leaf(data, "B1")["sequence"]["A"] = 0
    assert verify_json(data).verdict == "REJECT"


def test_wrong_limit_rejected():
    data = builtin_certificate_json(2, 3, 1)
    leaf(data, "B4")["sequence"]["B"] = 7
    report = verify_json(data)
    assert report.verdict == "REJECT"
    with pytest.raises(ConclusionRefused):
        conclude_decay(report)


def test_missing_leaf_not_exhaustive():
    data = builtin_certificate_json(2, 3, 1)
    data["branches"] = [b for b in data["branches"] if b["id"] != "B4"]
    report = verify_json(data)
    assert report.verdict == "REJECT"
    assert not report.exhaustive or report.failures


def test_decay_boundary():
    data = builtin_certificate_json(2, 3, 1)
    judgment(data, "b4_decay")["word"] = "m^{N} l^2"  # value 1/2 at N = 1, below r
    report = verify_json(data)
    assert any(f["judgment"] == "b4_decay" and "below r" in f["reason"] for f in report.failures)
    data = builtin_certificate_json(2, 3, 1)
    judgment(data, "b4_decay")["word"] = "m^{N+1} l^2"  # value exactly 1 at N = 1
    report = verify_json(data)
    assert not any(f["judgment"] == "b4_decay" for f in report.failures)


def test_malformed_certificates():
    data = builtin_certificate_json(2, 3, 1)
    broken = copy.deepcopy(data)
    del broken["judgments"][0]["word"]
    with pytest.raises(CertificateFormatError):
        DecayCertificate.from_json(broken)
    broken = copy.deepcopy(data)
    broken["judgments"][3]["premises"] = ["nonexistent"]
    try:
        verdict = verify_json(broken).verdict
    except CertificateFormatError:
        verdict = "REJECT"
    assert verdict == "REJECT"


def test_roundtrip_and_determinism(tmp_path):
    cert = builtin_cable_certificate(3, 4, 1)
    path = tmp_path / "c.json"
    cert.save(str(path))
    again = DecayCertificate.load(str(path))
    assert again.to_json() == cert.to_json()
    assert verify_derivation(cert, 2).dumps() == verify_derivation(again, 2).dumps()


@pytest.mark.parametrize("p,q,r", [(2, 3, 1), (3, 4, 1)])
def test_mutations_rejected(p, q, r):
    base = builtin_certificate_json(p, q, r)
    rng = random.Random(11)
    for _ in range(25):
        mutated, desc = mutate_certificate(base, rng)
        try:
            verdict = verify_json(mutated).verdict
        except CertificateFormatError:
            verdict = "REJECT"
        assert verdict == "REJECT", desc


def _random_order(rng):
    while True:
        f1 = (rng.randint(-9, 9), rng.randint(-9, 9))
        f2 = (rng.randint(-9, 9), rng.randint(-9, 9))
        if f1[0] * f2[1] - f1[1] * f2[0]:
            return ZZOrder(f1, f2)


@pytest.mark.parametrize("p,q,r", [(2, 3, 1), (2, 11, 5), (3, 5, 1)])
def test_decay_steps_positive_in_decayed_orders(p, q, r):
    """Every DECAY conclusion is positive in each Z^2 order that is positive on S_r."""
    cert = builtin_cable_certificate(p, q, r)
    rng = random.Random(p * q)
    orders = []
    while len(orders) < 100:
        o = _random_order(rng)
        if decayed_window_check(o, r) is WindowVerdict.ALL_POSITIVE:
            orders.append(o)
    # judgment ids start with their leaf's id, e.g. b3n2_right belongs to B3_n2
    leaf_choices = {lf.id.lower().replace("_", ""): {c.name: c for c in lf.choices} for lf in cert.leaves}
    checked = 0
    for j in cert.judgments:
        if j.rule != "DECAY":
            continue
        for k in range(4):
            for n in range(1, 4):
                env = {"k": k, "N": n}
                if "s" in j.word.params:
                    c = leaf_choices[j.id.split("_")[0]]["s"]
                    env["s"] = next(
                        s for s in range(c.min, 10**4)
                        if c.den.evaluate({**env, "s": s}) > 0
                        and Fraction(c.num.evaluate({**env, "s": s}), c.den.evaluate({**env, "s": s})) >= r
                    )
                w = j.word.instantiate(env)
                exps = dict.fromkeys("ml", 0)
                for g, e in w.syllables:
                    exps[g] += e
                s = reduce_slope(exps["m"], exps["l"])
                assert all(slope_sign(o, s) == 1 for o in orders)
                checked += 1
    assert checked > 0
