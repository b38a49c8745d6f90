"""JSON-compatible encoding of words, flows, specs and extensions.

Complex numbers are ``[re, im]`` pairs; polynomials are lists of
``{"exponents": [...], "coeff": [re, im]}``; words list their factors in
application order and say so in an ``order`` field.
"""
from __future__ import annotations

import json

import numpy as np

from .autgroup import APPLICATION_ORDER, Affine, AutomorphismWord, OverShear, Shear
from .errors import SpecFormatError
from .extension import BundleSpec, ExtendedBundle, ParamWord
from .flows import AffineFlow, ConjugatedFlow, LinearFlow, OverShearFlow, ShearFlow
from .geometry import DiskSpec, DomainSpec
from .polynomial import Polynomial

SPEC_VERSION = "bundlex-spec/1"
EXTENSION_VERSION = "bundlex-extension/1"


def c2l(x):
    x = complex(x)
    return [x.real, x.imag]


def l2c(v):
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise SpecFormatError(f"complex number must be [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def matrix_to_list(m):
    return [[c2l(x) for x in row] for row in np.asarray(m)]


def list_to_matrix(rows):
    return np.array([[l2c(x) for x in row] for row in rows], dtype=complex)


def poly_to_list(q: Polynomial):
    return [{"exponents": list(e), "coeff": c2l(c)} for e, c in q.terms.items()]


def list_to_poly(entries, nvars):
    try:
        return Polynomial(nvars, {tuple(t["exponents"]): l2c(t["coeff"]) for t in entries})
    except (KeyError, TypeError) as exc:
        raise SpecFormatError(f"bad polynomial: {exc}") from exc


def elementary_to_dict(e):
    if isinstance(e, Affine):
        return {"type": "affine", "matrix": matrix_to_list(e.matrix), "translation": [c2l(x) for x in e.translation]}
    if isinstance(e, Shear):
        return {"type": "shear", "axis": e.axis, "q": poly_to_list(e.q)}
    if isinstance(e, OverShear):
        return {"type": "overshear", "axis": e.axis, "q": poly_to_list(e.q)}
    raise TypeError(f"cannot serialize {e!r}")


def dict_to_elementary(d, n):
    try:
        kind = d["type"]
        if kind == "affine":
            return Affine(list_to_matrix(d["matrix"]), [l2c(x) for x in d.get("translation", [[0, 0]] * n)])
        if kind in ("shear", "overshear"):
            cls = Shear if kind == "shear" else OverShear
            return cls(int(d["axis"]), list_to_poly(d["q"], n))
    except SpecFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecFormatError(f"bad elementary {d!r}: {exc}") from exc
    raise SpecFormatError(f"unknown elementary type {d.get('type')!r}")


def word_to_dict(w: AutomorphismWord):
    return {"order": APPLICATION_ORDER, "dimension": w.dimension,
            "factors": [elementary_to_dict(e) for e in w.factors]}


def dict_to_word(d):
    try:
        if d.get("order", APPLICATION_ORDER) != APPLICATION_ORDER:
            raise SpecFormatError(f"unsupported word order {d.get('order')!r}")
        n = int(d["dimension"])
        return AutomorphismWord(tuple(dict_to_elementary(e, n) for e in d["factors"]), n)
    except (KeyError, TypeError, AttributeError) as exc:
        raise SpecFormatError(f"bad word: {exc}") from exc


def flow_to_dict(f):
    if isinstance(f, ShearFlow):
        return {"type": "shear_flow", "axis": f.axis, "q": poly_to_list(f.q)}
    if isinstance(f, OverShearFlow):
        return {"type": "overshear_flow", "axis": f.axis, "q": poly_to_list(f.q)}
    if isinstance(f, LinearFlow):
        return {"type": "linear_flow", "generator": matrix_to_list(f.generator), "branch_rotated": f.branch_rotated}
    if isinstance(f, AffineFlow):
        return {"type": "affine_flow", "generator": matrix_to_list(f.generator), "branch_rotated": f.branch_rotated}
    if isinstance(f, ConjugatedFlow):
        return {"type": "conjugated_flow", "base": flow_to_dict(f.base), "conjugator": word_to_dict(f.conjugator)}
    raise TypeError(f)


def dict_to_flow(d, n):
    kind = d["type"]
    if kind == "shear_flow":
        return ShearFlow(int(d["axis"]), list_to_poly(d["q"], n))
    if kind == "overshear_flow":
        return OverShearFlow(int(d["axis"]), list_to_poly(d["q"], n))
    if kind == "linear_flow":
        return LinearFlow(list_to_matrix(d["generator"]), bool(d.get("branch_rotated", False)))
    if kind == "affine_flow":
        return AffineFlow(list_to_matrix(d["generator"]), bool(d.get("branch_rotated", False)))
    if kind == "conjugated_flow":
        return ConjugatedFlow(dict_to_flow(d["base"], n), dict_to_word(d["conjugator"]))
    raise SpecFormatError(f"unknown flow type {kind!r}")


def domain_to_dict(d: DomainSpec):
    return {"outer_radius": d.outer_radius, "holes": [{"center": h.center, "radius": h.radius} for h in d.holes]}


def dict_to_domain(d):
    try:
        return DomainSpec(float(d["outer_radius"]),
                          tuple(DiskSpec(float(h["center"]), float(h["radius"])) for h in d["holes"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecFormatError(f"bad domain: {exc}") from exc


def spec_to_dict(spec: BundleSpec):
    out = {
        "version": SPEC_VERSION,
        "domain": domain_to_dict(spec.domain),
        "gap_words": [word_to_dict(w) for w in spec.gap_words],
    }
    if spec.factorizations:
        out["factorizations"] = {
            str(j): [elementary_to_dict(e) for e in f] for j, f in sorted(spec.factorizations.items())
        }
    if spec.outer_factorization is not None:
        out["outer_factorization"] = [elementary_to_dict(e) for e in spec.outer_factorization]
    return out


def dict_to_spec(d) -> BundleSpec:
    if not isinstance(d, dict):
        raise SpecFormatError("spec file must hold a JSON object")
    if d.get("version") != SPEC_VERSION:
        raise SpecFormatError(f"unsupported spec version {d.get('version')!r}")
    try:
        words = tuple(dict_to_word(w) for w in d["gap_words"])
        if not words:
            raise SpecFormatError("no gap words")
        n = words[0].dimension
        facs = {int(j): tuple(dict_to_elementary(e, n) for e in f) for j, f in d.get("factorizations", {}).items()}
        outer = d.get("outer_factorization")
        if outer is not None:
            outer = tuple(dict_to_elementary(e, n) for e in outer)
        return BundleSpec(dict_to_domain(d["domain"]), words, facs, outer)
    except SpecFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecFormatError(f"bad spec: {exc}") from exc


def dumps_spec(spec: BundleSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2, sort_keys=True) + "\n"


def loads_spec(text: str) -> BundleSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFormatError(f"not valid JSON: {exc}") from exc
    return dict_to_spec(data)


def paramword_to_dict(w: ParamWord):
    out = []
    for f in w.factors:
        if f.const is not None:
            c = f.const
            out.append({"const": word_to_dict(c) if isinstance(c, AutomorphismWord) else elementary_to_dict(c)})
        else:
            out.append({"flow": flow_to_dict(f.flow), "time": f.time.to_dict(), "chart": f.chart.to_dict()})
    return out


def extension_to_dict(ext: ExtendedBundle):
    return {
        "version": EXTENSION_VERSION,
        "spec": spec_to_dict(ext.spec),
        "charts": [
            {"name": c.name, "region": c.region.to_dict(), "provenance": c.provenance} for c in ext.charts
        ],
        "transitions": [
            {"source": l.source, "target": l.target, "region": l.region.to_dict(),
             "word": paramword_to_dict(l.word), "provenance": l.provenance}
            for l in ext.links
        ],
        "holes": [
            {"name": h.name, "path": h.path, "factors": h.gluing.k, "sub_holes": h.sub_holes,
             "flows": [flow_to_dict(f) for f in h.gluing.flows]}
            for h in ext.holes
        ],
    }


def dumps_extension(ext: ExtendedBundle) -> str:
    return json.dumps(extension_to_dict(ext), indent=2, sort_keys=True) + "\n"
