"""Predicted corollary tables, with measured witnesses from the built-in registry.

Every table row is a structure class with its ``(k, eps)`` signature. All the
identities the predictions rest on depend on ``(k, eps)`` alone, so a
registry entry of the right dimension and signature is a legitimate witness
whatever its class tag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .family import Preset
from .nk import builtin_registry, nk_frames
from .pseudosym import ConditionSpec, fit_L, rrsl_corollary_check
from .tensors import max_abs

# (label, k, eps); k None means "k" is symbolic (any entry with that eps qualifies)
CLASS_ROWS = (
    ("N(k)-contact metric", None, 1),
    ("Sasakian", 1, 1),
    ("Kenmotsu", -1, 1),
    ("(eps)-Sasakian, eps=-1", -1, -1),
    ("para-Sasakian", -1, 1),
    ("(eps)-para-Sasakian, eps=-1", 1, -1),
)


@dataclass(frozen=True)
class TableDef:
    title: str
    kind: str           # "dichotomy" (L = k or S-form) or "rrsl" (both, when not semisymmetric)
    condition: str      # condition kind of the witness fit
    preset: str         # T_b of the witness fit; "*" means the --preset argument
    s_form: str         # "kn" | "r/n" | "eta"


TABLES = {
    "tps": TableDef("R.T_a = L Q(g,T_a), T_a in {R,V,P,M,W0,W0*,W1,W1*,W3..W8}",
                    "dichotomy", "TT-g", "r", "kn"),
    "quasi-conformal": TableDef("quasi-conformal pseudosymmetric", "dichotomy", "TT-g",
                                "quasi-conformal", "kn"),
    "pseudo-projective": TableDef("pseudo-projective pseudosymmetric", "dichotomy", "TT-g",
                                  "pseudo-projective", "kn"),
    "weyl": TableDef("Weyl pseudosymmetric", "dichotomy", "TT-g", "conformal", "eta"),
    "conharmonic": TableDef("conharmonic pseudosymmetric", "dichotomy", "TT-g", "conharmonic", "eta"),
    "w2": TableDef("W2-pseudosymmetric", "dichotomy", "TT-g", "w2", "r/n"),
    "w9": TableDef("W9-pseudosymmetric", "dichotomy", "TT-g", "w9", "eta"),
    "ricci": TableDef("Ricci-pseudosymmetric R.S = L Q(g,S)", "dichotomy", "T-RicciT-g", "r", "kn"),
    "t-ricci": TableDef("R.S_{T_a} = L Q(g,S_{T_a})", "dichotomy", "T-RicciT-g", "*", "kn"),
    "rgp": TableDef("Ricci-generalized pseudosymmetric R.R = L Q(S,R)", "rrsl", "TT-Sl", "r", "kn"),
    "rr-sl": TableDef("R.R = L Q(S^l,R)", "rrsl", "TT-Sl", "r", "kn"),
}


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _s_form_text(form: str, k, eps, n: int, ell: int = 1) -> str:
    if form == "r/n":
        return "(r/n) g"
    if form == "eta":
        if k is None:
            return f"(r/{n - 1} - k) g + (n k - r/{n - 1}) eta x eta"
        return f"(r/{n - 1} - ({_fmt(k)})) g + ({_fmt(eps)})*({_fmt(n * k)} - r/{n - 1}) eta x eta"
    if k is None:
        return f"k^{ell} ({n - 1})^{ell} g" if ell != 1 else f"k ({n - 1}) g"
    return f"{_fmt((k * (n - 1)) ** ell)} g"


def _s_form_residual(form: str, fr) -> float:
    n, g, s, r, k, e = fr.n, fr.g, fr.S.data, fr.r, fr.k, fr.eps
    if form == "r/n":
        target = (r / n) * g
    elif form == "eta":
        target = (r / (n - 1) - k) * g + e * (n * k - r / (n - 1)) * np.outer(fr.eta, fr.eta)
    else:
        target = k * (n - 1) * g
    return max_abs(s - target)


def _candidates(n: int, k, eps):
    for spec in builtin_registry():
        if spec.n != n or not spec.has_xi:
            continue
        if spec.eps == eps and (k is None or spec.k == k):
            yield spec


def _witness_dichotomy(td: TableDef, spec, tb: str, points: int, tol: float) -> dict:
    cond = ConditionSpec.from_presets(td.condition, "r", tb, spec.n)
    worst = 0.0
    ok = True
    for fr in nk_frames(spec, points):
        rep = fit_L(cond, fr)
        s_res = _s_form_residual(td.s_form, fr)
        l_gap = abs(rep.L - fr.k) if rep.L is not None else np.inf
        branch = min(s_res / max(1.0, fr.S.max_abs()), l_gap / max(1.0, abs(fr.k)))
        worst = max(worst, branch)
        ok &= bool(branch <= tol) and (rep.L is None or rep.residual <= tol * max(1.0, rep.rhs_norm))
    return {"entry": spec.name, "applicable": True, "holds": ok, "residual": float(worst)}


def _witness_rrsl(spec, ell: int, points: int, tol: float) -> dict:
    reps = [rrsl_corollary_check(fr, ell, tol) for fr in nk_frames(spec, points)]
    if not all(r.applicable for r in reps):
        return {"entry": spec.name, "applicable": False, "holds": False, "residual": None,
                "reason": next(r.reason for r in reps if not r.applicable)}
    worst = max(max(r.l_gap, r.einstein_residual) for r in reps)
    return {"entry": spec.name, "applicable": True, "holds": all(r.holds for r in reps),
            "residual": float(worst), "fitted_L": float(np.mean([r.fitted_L for r in reps]))}


def build_table(name: str, n: int, ell: int = 1, preset: str = "r", points: int = 5,
                tol: float = 1e-8) -> dict:
    """Predicted rows of table ``name`` at dimension ``n`` with witness marks."""
    if name not in TABLES:
        raise KeyError(name)
    if n < 3:
        raise ValueError("tables need n >= 3")
    td = TABLES[name]
    if name == "rgp":
        ell = 1
    tb = Preset.from_name(preset).value if td.preset == "*" else td.preset
    rows = []
    for label, k, eps in CLASS_ROWS:
        if td.kind == "rrsl":
            L = "1/(k^%d (%d)^%d)" % (ell - 1, n - 1, ell) if k is None else _fmt(
                1.0 / (k ** (ell - 1) * (n - 1) ** ell))
            s_text = _s_form_text("kn", k, eps, n, ell)
            witnesses = [_witness_rrsl(spec, ell, points, tol) for spec in _candidates(n, k, eps)]
        else:
            L = "k" if k is None else _fmt(k)
            s_text = _s_form_text(td.s_form, k, eps, n)
            witnesses = [_witness_dichotomy(td, spec, tb, points, tol)
                         for spec in _candidates(n, k, eps)]
        applicable = [w for w in witnesses if w["applicable"]]
        rows.append({
            "class": label, "k": k, "eps": eps, "L": L, "S": s_text,
            "mark": "witnessed" if any(w["holds"] for w in applicable) else "unwitnessed",
            "contradicted_by": sorted(w["entry"] for w in applicable if not w["holds"]),
            "witnesses": witnesses,
        })
    out = {"name": name, "title": td.title, "n": n, "rows": rows}
    if td.kind == "rrsl":
        out["ell"] = ell
    if td.preset == "*":
        out["preset"] = tb
    return out

