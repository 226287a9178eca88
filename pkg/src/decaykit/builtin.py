"""Generator for the standard cabling decay certificate.

Notation (all words over m, l, t; ``b = m^u l^v``, ``C = mu_C = b t^-v``)::

    Y(k)    = m^-k t^-v b m^k
    X_n(k)  = (m^-k t^-v m^k)^n b^n
    Z(k)    = m^(-k-1) C m^k

Case tree, below the root hypothesis ``t^p > 1``::

    C > 1                                    -> leaf B1
    C < 1, Y(k) > 1 for some k               -> leaf B2
    C < 1, Y(k) < 1 for all k,
        X_(p-1)(k) > 1 for some k            -> leaves B3_n: n is the least
                                                index with X_n(k) > 1,
                                                found by splitting on
                                                X_2, ..., X_(p-2) in turn
        X_(p-1)(k) < 1 for all k             -> leaf B4

For p = 2 the third case contradicts the second hypothesis outright, since
X_1(k) = Y(k).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Any

from .cable import euclid_uv
from .certificate import ROOT_HYP, DecayCertificate, fraction_text
from .words import parse_parametric

__all__ = ["builtin_cable_certificate", "builtin_certificate_json"]


def _inverse(text: str) -> str:
    return str(~parse_parametric(text, ("m", "l", "t")))


class _Builder:
    def __init__(self) -> None:
        self.judgments: list[dict[str, Any]] = []

    def add(self, jid: str, word: str, sign: str, rule: str, premises=(), **side) -> str:
        self.judgments.append(
            {
                "id": jid,
                "word": word,
                "sign": sign,
                "rule": rule,
                "premises": list(premises),
                "side": side,
            }
        )
        return jid

    def word(self, jid: str) -> str:
        return next(j["word"] for j in self.judgments if j["id"] == jid)


def builtin_certificate_json(p: int, q: int, r: Fraction | int | str) -> dict[str, Any]:
    r = Fraction(r)
    if p < 2 or q < 1 or gcd(p, q) != 1:
        raise ValueError(f"need coprime p >= 2, q >= 1, got ({p}, {q})")
    if r <= 0:
        raise ValueError("companion decay bound must be positive")
    if Fraction(q, p) <= r:
        raise ValueError(f"cabling criterion inapplicable: {q}/{p} <= {fraction_text(r)}")
    u, v = euclid_uv(p, q)
    pq = p * q
    POS, NEG = "POSITIVE", "NEGATIVE"

    b = f"m^{u} l^{v}"
    C = f"({b} t^-{v})"
    lam = f"({C}^-{pq} t^{p})"
    Y = f"m^{{-k}} t^-{v} {b} m^k"

    def X(n: int) -> str:
        return f"(m^{{-k}} t^-{v} m^k)^{n} ({b})^{n}"

    B = _Builder()
    B.add("R0", f"t^{p}", POS, "HYP", hyp=ROOT_HYP)
    B.add("R1", f"m^{q} l^{p}", POS, "EQ", ["R0"])

    nodes: list[dict[str, Any]] = []
    leaves: list[dict[str, Any]] = []

    # C > 1: mu_C^(N+pq) lambda_C = C^N t^p
    B.add("b1_hyp", C, POS, "HYP", hyp="C_pos")
    B.add("b1_slope", f"{C}^{{N+{pq}}} {lam}", POS, "PROD", [{"ref": "b1_hyp", "power": "N"}, "R0"])
    leaves.append(
        {"id": "B1", "conclusion": "b1_slope", "sequence": {"A": 1, "B": pq, "D": 1, "index": "N"}, "choices": []}
    )

    # some conjugate Y(k) positive
    B.add("b2_hyp", Y, POS, "HYP", hyp="Y_some")
    B.add("b2_power", f"m^{{-k}} (t^-{v} {b})^N m^k", POS, "PROD", [{"ref": "b2_hyp", "power": "N"}])
    B.add("b2_left", f"m^{{k+{u}}} l^{v}", POS, "DECAY", ["R1"])
    B.add("b2_right", f"m^{{{q}*s-k-{u}}} l^{{{p}*s-{v}}}", POS, "DECAY", ["R1"])
    prod = " ".join(B.word(x) for x in ("b2_left", "b2_power", "b2_right"))
    B.add("b2_product", prod, POS, "PROD", ["b2_left", "b2_power", "b2_right"])
    B.add("b2_slope", f"{C}^{{N+{pq}*s}} {lam}^s", POS, "EQ", ["b2_product"])
    leaves.append(
        {
            "id": "B2",
            "conclusion": "b2_slope",
            "sequence": {"A": 1, "B": f"{pq}*s", "D": "s", "index": "N"},
            "choices": [{"name": "s", "min": 1, "num": f"{q}*s-k-{u}", "den": f"{p}*s-{v}"}],
        }
    )

    # every Y(k) negative, some X_(p-1)(k) positive
    if p == 2:
        B.add("b3_pos", X(1), POS, "HYP", hyp="X_some")
        B.add("b3_neg", Y, NEG, "HYP", hyp="Y_all")
        leaves.append({"id": "B3", "contradiction": ["b3_pos", "b3_neg"]})
        b3_entry = "B3"
    else:
        B.add("t_pos", "t", POS, "POWER_ROOT", ["R0"], power=p)
        for n in range(2, p):
            pre = f"b3n{n}_"
            pos_hyp = "X_some" if n == p - 1 else f"X{n}_pos"
            B.add(pre + "pos", X(n), POS, "HYP", hyp=pos_hyp)
            if n == 2:
                B.add(pre + "neg_y", Y, NEG, "HYP", hyp="Y_all")
                B.add(pre + "neg", X(1), NEG, "EQ", [pre + "neg_y"])
            else:
                B.add(pre + "neg", X(n - 1), NEG, "HYP", hyp=f"X{n - 1}_neg")
            B.add(pre + "a", f"m^{{-k}} t^-{v * n} ({b})^{n} m^k", POS, "EQ", [pre + "pos"])
            B.add(pre + "inv", _inverse(X(n - 1)), POS, "INV", [pre + "neg"])
            B.add(pre + "b", f"m^{{-k}} ({b})^{1 - n} t^{v * (n - 1)} m^k", POS, "EQ", [pre + "inv"])
            B.add(pre + "P", B.word(pre + "a") + " " + B.word(pre + "b"), POS, "PROD", [pre + "a", pre + "b"])
            B.add(pre + "tpow", f"t^{p * v * (n - 1)}", POS, "PROD", [{"ref": "R0", "power": v * (n - 1)}])
            B.add(pre + "conj_pow", f"(m^{{-k}} t^{v * (n - 1)} m^k)^{p}", POS, "EQ", [pre + "tpow"])
            B.add(pre + "conj", f"m^{{-k}} t^{v * (n - 1)} m^k", POS, "POWER_ROOT", [pre + "conj_pow"], power=p)
            B.add(pre + "tail", f"t^{v * (p - n)}", POS, "PROD", [{"ref": "t_pos", "power": v * (p - n)}])
            B.add(pre + "left", f"m^{{k+{u}}} l^{v}", POS, "DECAY", ["R1"])
            B.add(pre + "right", f"m^{{{q}*s-k}} l^{{{p}*s}}", POS, "DECAY", ["R1"])
            factors = [pre + "left", pre + "conj", {"ref": pre + "P", "power": "N-1"}, pre + "right", pre + "tail"]
            words = [
                B.word(pre + "left"),
                B.word(pre + "conj"),
                f"({B.word(pre + 'P')})^{{N-1}}",
                B.word(pre + "right"),
                B.word(pre + "tail"),
            ]
            B.add(pre + "product", " ".join(words), POS, "PROD", factors)
            B.add(pre + "slope", f"{C}^{{N+{pq}*s+{pq * v}}} {lam}^{{s+{v}}}", POS, "EQ", [pre + "product"])
            leaves.append(
                {
                    "id": f"B3_n{n}",
                    "conclusion": pre + "slope",
                    "sequence": {"A": 1, "B": f"{pq}*s+{pq * v}", "D": f"s+{v}", "index": "N"},
                    "choices": [{"name": "s", "min": 1, "num": f"{q}*s-k", "den": f"{p}*s"}],
                    "info": {"n": n, "n_le_p_minus_1": n <= p - 1, "n_le_q_minus_1": n <= q - 1},
                }
            )
        for n in range(2, p - 1):
            nxt = f"split_X{n + 1}" if n + 1 <= p - 2 else f"B3_n{p - 1}"
            nodes.append(
                {
                    "id": f"split_X{n}",
                    "pivot": X(n),
                    "var": None,
                    "positive": {"hyp": f"X{n}_pos", "next": f"B3_n{n}"},
                    "negative": {"hyp": f"X{n}_neg", "next": nxt},
                }
            )
        b3_entry = "split_X2" if p >= 4 else "B3_n2"

    # every Y(k) and every X_(p-1)(k) negative
    B.add("b4_hyp", X(p - 1), NEG, "HYP", hyp="X_all")
    B.add("b4_inv", _inverse(X(p - 1)), POS, "INV", ["b4_hyp"])
    B.add("b4_step", f"m^{{-k-1}} {C} m^k", POS, "EQ", ["b4_inv"])
    B.add(
        "b4_chain",
        f"m^{{-N}} {C}^N",
        POS,
        "PROD",
        [{"ref": "b4_step", "subst": {"k": "j"}, "index": {"var": "j", "from": "N-1", "to": 0}}],
    )
    B.add("b4_decay", f"m^{{N+{q}}} l^{p}", POS, "DECAY", ["R1"])
    B.add("b4_shift", f"m^N t^{p}", POS, "EQ", ["b4_decay"])
    B.add("b4_product", B.word("b4_shift") + " " + B.word("b4_chain"), POS, "PROD", ["b4_shift", "b4_chain"])
    B.add("b4_slope", f"{C}^{{N+{pq}}} {lam}", POS, "EQ", ["b4_product"])
    leaves.append(
        {"id": "B4", "conclusion": "b4_slope", "sequence": {"A": 1, "B": pq, "D": 1, "index": "N"}, "choices": []}
    )

    top = [
        {
            "id": "split_C",
            "pivot": C,
            "var": None,
            "positive": {"hyp": "C_pos", "next": "B1"},
            "negative": {"hyp": "C_neg", "next": "split_Y"},
        },
        {
            "id": "split_Y",
            "pivot": Y,
            "var": "k",
            "positive": {"hyp": "Y_some", "next": "B2"},
            "negative": {"hyp": "Y_all", "next": "split_X"},
        },
        {
            "id": "split_X",
            "pivot": X(p - 1),
            "var": "k",
            "positive": {"hyp": "X_some", "next": b3_entry},
            "negative": {"hyp": "X_all", "next": "B4"},
        },
    ]

    identities = _identities(p, q, u, v)
    return {
        "p": p,
        "q": q,
        "r": fraction_text(r),
        "parameters": [{"name": "k", "min": 0}, {"name": "N", "min": 1}],
        "root": {"hyp": ROOT_HYP, "word": f"t^{p}", "sign": POS},
        "branches": top + nodes + leaves,
        "judgments": B.judgments,
        "identities": identities,
    }


def _identities(p: int, q: int, u: int, v: int) -> list[dict[str, Any]]:
    pq = p * q
    b = f"m^{u} l^{v}"
    C = f"({b} t^-{v})"
    lam = f"({C}^-{pq} t^{p})"
    out = [
        {"label": "crucial identity", "lhs": f"(t^-{v})^{p} ({b})^{p}", "rhs": "m"},
        {"label": "crucial identity, factors swapped", "lhs": f"({b})^{p} (t^-{v})^{p}", "rhs": "m"},
        {"label": "t^p commutes with m", "lhs": f"t^{p} m", "rhs": f"m t^{p}"},
        {"label": "t^p commutes with l", "lhs": f"t^{p} l", "rhs": f"l t^{p}"},
        {"label": "t^p commutes with mu_C", "lhs": f"t^{p} {C}", "rhs": f"{C} t^{p}"},
        {"label": "cable slope of value pq", "lhs": f"{C}^{pq} {lam}", "rhs": f"t^{p}"},
        {
            "label": "mu_C^N through the conjugate of t^-v b",
            "lhs": f"{C}^N",
            "rhs": f"{b} m^k (m^{{-k}} (t^-{v} {b})^N m^k) m^{{-k-{u}}} l^-{v}",
        },
        {
            "label": "slope as a product, conjugate case",
            "lhs": f"{C}^{{N+{pq}*s}} {lam}^s",
            "rhs": f"m^{{k+{u}}} l^{v} (m^{{-k}} (t^-{v} {b})^N m^k) m^{{{q}*s-k-{u}}} l^{{{p}*s-{v}}}",
            "domain": {"s": 1},
        },
        {
            "label": "X_(p-1)(k) simplified",
            "lhs": f"(m^{{-k}} t^-{v} m^k)^{p - 1} ({b})^{p - 1}",
            "rhs": f"m^{{-k}} t^{v} l^-{v} m^-{u} m^{{k+1}}",
        },
        {
            "label": "inverse of X_(p-1)(k)",
            "lhs": f"((m^{{-k}} t^-{v} m^k)^{p - 1} ({b})^{p - 1})^-1",
            "rhs": f"m^{{-k-1}} {C} m^k",
        },
        {
            "label": "t^p shifts a companion slope",
            "lhs": f"m^N t^{p}",
            "rhs": f"m^{{N+{q}}} l^{p}",
        },
    ]
    for n in range(2, p):
        bn = f"({b})^{n}"
        a = f"m^{{-k}} t^-{v * n} {bn} m^k"
        c = f"m^{{-k}} ({b})^{1 - n} t^{v * (n - 1)} m^k"
        out += [
            {"label": f"X_{n}(k) rearranged", "lhs": f"(m^{{-k}} t^-{v} m^k)^{n} {bn}", "rhs": a},
            {
                "label": f"inverse of X_{n - 1}(k) rearranged",
                "lhs": f"((m^{{-k}} t^-{v} m^k)^{n - 1} ({b})^{n - 1})^-1",
                "rhs": c,
            },
            {
                "label": f"mu_C^N rewritten with n = {n}",
                "lhs": f"{C}^N",
                "rhs": f"m^{{k+{u}}} l^{v} (m^{{-k}} t^{v * (n - 1)} m^k) ({a} {c})^{{N-1}} m^{{-k}} t^-{v * n}",
            },
            {
                "label": f"p-th power of the conjugated t-power, n = {n}",
                "lhs": f"(m^{{-k}} t^{v * (n - 1)} m^k)^{p}",
                "rhs": f"t^{p * v * (n - 1)}",
            },
            {
                "label": f"slope as a product, n = {n}",
                "lhs": f"{C}^{{N+{pq}*s+{pq * v}}} {lam}^{{s+{v}}}",
                "rhs": (
                    f"m^{{k+{u}}} l^{v} (m^{{-k}} t^{v * (n - 1)} m^k) ({a} {c})^{{N-1}} "
                    f"m^{{{q}*s-k}} l^{{{p}*s}} t^{v * (p - n)}"
                ),
                "domain": {"s": 1},
            },
        ]
    return out


def builtin_cable_certificate(p: int, q: int, r: Fraction | int | str) -> DecayCertificate:
    """The certificate for: the (p, q)-cable of an r-decayed knot is pq-decayed."""
    return DecayCertificate.from_json(builtin_certificate_json(p, q, r))
