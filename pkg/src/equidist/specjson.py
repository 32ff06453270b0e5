"""Canonical JSON encoding of specs.

Every object is a dict with a ``"kind"`` tag and named parameters.  Exact
rationals travel as ``"p/q"`` strings and floats as JSON numbers, so
``decode(encode(x)) == x`` for every spec.
"""

from __future__ import annotations

import json
from fractions import Fraction

from . import meanstats, partition, polyadic, seqcore
from .errors import EquidistError, SpecParseError


def encode_number(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    return x


def decode_number(x, where):
    if isinstance(x, bool):
        raise SpecParseError(f"expected a number at {where}", field=where)
    if isinstance(x, (int, float)):
        return x
    if isinstance(x, str):
        try:
            f = Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise SpecParseError(f"cannot read {x!r} as a rational at {where}", field=where) from None
        return f.numerator if f.denominator == 1 and "/" not in x else f
    raise SpecParseError(f"expected a number at {where}, got {type(x).__name__}", field=where)


def _get(obj, key, where):
    if not isinstance(obj, dict):
        raise SpecParseError(f"expected an object at {where}", field=where)
    if key not in obj:
        raise SpecParseError(f"missing field {key!r}", field=f"{where}.{key}")
    return obj[key]


def _int(x, where):
    if isinstance(x, bool) or not isinstance(x, int):
        raise SpecParseError(f"expected an integer at {where}", field=where)
    return x


def _list(x, where):
    if not isinstance(x, list):
        raise SpecParseError(f"expected a list at {where}", field=where)
    return x


def _wrap(where, fn, *args, **kw):
    """Re-raise domain validation errors with the JSON path of the object."""
    try:
        return fn(*args, **kw)
    except SpecParseError:
        raise
    except EquidistError as exc:
        exc.field = f"{where}.{exc.field}" if exc.field else where
        raise


# -- sequence specs ---------------------------------------------------------


def encode_sequence(spec):
    if isinstance(spec, seqcore.VanDerCorput):
        return {"kind": "van_der_corput", "base": spec.base}
    if isinstance(spec, seqcore.PeriodicList):
        return {"kind": "periodic_list", "values": [encode_number(v) for v in spec.values]}
    if isinstance(spec, seqcore.MultiplicativeAlpha):
        return {"kind": "multiplicative_alpha", "primes": list(spec.primes),
                "exponent": encode_number(spec.exponent)}
    if isinstance(spec, seqcore.Constant):
        return {"kind": "constant", "c": encode_number(spec.c)}
    if isinstance(spec, seqcore.PartitionExtension):
        return {"kind": "partition_extension", "system": encode_partition(spec.system),
                "level": spec.level}
    raise TypeError(f"cannot encode {spec!r}")


def decode_sequence(obj, where="spec"):
    kind = _get(obj, "kind", where)
    if kind == "van_der_corput":
        return _wrap(where, seqcore.VanDerCorput, _int(_get(obj, "base", where), f"{where}.base"))
    if kind == "periodic_list":
        vals = _list(_get(obj, "values", where), f"{where}.values")
        return _wrap(where, seqcore.PeriodicList,
                     tuple(decode_number(v, f"{where}.values[{i}]") for i, v in enumerate(vals)))
    if kind == "multiplicative_alpha":
        primes = _list(_get(obj, "primes", where), f"{where}.primes")
        primes = tuple(_int(p, f"{where}.primes[{i}]") for i, p in enumerate(primes))
        s = decode_number(_get(obj, "exponent", where), f"{where}.exponent")
        return _wrap(where, seqcore.MultiplicativeAlpha, primes, s)
    if kind == "constant":
        return _wrap(where, seqcore.Constant, decode_number(_get(obj, "c", where), f"{where}.c"))
    if kind == "partition_extension":
        system = decode_partition(_get(obj, "system", where), f"{where}.system")
        level = _int(_get(obj, "level", where), f"{where}.level")
        return seqcore.PartitionExtension(system, level)
    raise SpecParseError(f"unknown sequence kind {kind!r}", field=f"{where}.kind")


def encode_index(spec):
    if isinstance(spec, seqcore.Identity):
        return {"kind": "identity"}
    if isinstance(spec, seqcore.BlockShuffle):
        return {"kind": "block_shuffle", "modulus": spec.modulus,
                "permutation": list(spec.permutation)}
    raise TypeError(f"cannot encode {spec!r}")


def decode_index(obj, where="index"):
    kind = _get(obj, "kind", where)
    if kind == "identity":
        return seqcore.Identity()
    if kind == "block_shuffle":
        m = _int(_get(obj, "modulus", where), f"{where}.modulus")
        perm = _list(_get(obj, "permutation", where), f"{where}.permutation")
        perm = tuple(_int(p, f"{where}.permutation[{i}]") for i, p in enumerate(perm))
        return _wrap(where, seqcore.BlockShuffle, m, perm)
    raise SpecParseError(f"unknown index kind {kind!r}", field=f"{where}.kind")


# -- test functions ---------------------------------------------------------


def encode_function(g):
    if isinstance(g, meanstats.Monomial):
        return {"kind": "monomial", "degree": g.degree}
    return {"kind": "piecewise_linear",
            "knots": [[encode_number(x), encode_number(y)] for x, y in g.knots]}


def decode_function(obj, where="g"):
    kind = _get(obj, "kind", where)
    if kind == "monomial":
        return _wrap(where, meanstats.Monomial, _int(_get(obj, "degree", where), f"{where}.degree"))
    if kind == "piecewise_linear":
        knots = _list(_get(obj, "knots", where), f"{where}.knots")
        pairs = []
        for i, k in enumerate(knots):
            if not isinstance(k, list) or len(k) != 2:
                raise SpecParseError("knots are [x, y] pairs", field=f"{where}.knots[{i}]")
            pairs.append((decode_number(k[0], f"{where}.knots[{i}][0]"),
                          decode_number(k[1], f"{where}.knots[{i}][1]")))
        return _wrap(where, meanstats.PiecewiseLinear, tuple(pairs))
    raise SpecParseError(f"unknown test function kind {kind!r}", field=f"{where}.kind")


# -- partition systems and sequence systems ---------------------------------


def encode_partition(system):
    if system.name == "explicit":
        return {"kind": "explicit",
                "levels": {str(N): [encode_number(v) for v in vs] for N, vs in system.data.items()}}
    if system.name in partition.BUILTINS:
        return {"kind": "builtin", "name": system.name, "params": dict(system.params)}
    raise TypeError(f"cannot encode partition system {system.name!r}")


def decode_partition(obj, where="system"):
    kind = _get(obj, "kind", where)
    if kind == "explicit":
        levels = _get(obj, "levels", where)
        if not isinstance(levels, dict):
            raise SpecParseError("levels must map level numbers to arrays", field=f"{where}.levels")
        data = {}
        for key, vals in levels.items():
            try:
                N = int(key)
            except ValueError:
                raise SpecParseError(f"level key {key!r} is not an integer",
                                     field=f"{where}.levels") from None
            vals = _list(vals, f"{where}.levels.{key}")
            data[N] = [decode_number(v, f"{where}.levels.{key}[{i}]") for i, v in enumerate(vals)]
        system = _wrap(where, partition.PartitionSystem.explicit, data)
        for N in system.levels:
            _wrap(f"{where}.levels.{N}", system.values, N)
        return system
    if kind == "builtin":
        name = _get(obj, "name", where)
        params = obj.get("params", {}) or {}
        if not isinstance(params, dict):
            raise SpecParseError("params must be an object", field=f"{where}.params")
        try:
            return _wrap(where, partition.builtin, name, **params)
        except TypeError as exc:
            raise SpecParseError(str(exc), field=f"{where}.params") from None
    raise SpecParseError(f"unknown partition kind {kind!r}", field=f"{where}.kind")


def encode_system(system):
    out = {"kind": "sequence_system", "levels": [encode_sequence(s) for s in system.levels]}
    if system.bound_series is not None:
        out["bound_series"] = [encode_number(a) for a in system.bound_series]
    return out


def decode_system(obj, where="system"):
    kind = obj.get("kind", "sequence_system") if isinstance(obj, dict) else None
    if kind == "example1":
        chain = [_int(b, f"{where}.chain[{i}]")
                 for i, b in enumerate(_list(_get(obj, "chain", where), f"{where}.chain"))]
        c = decode_number(obj.get("c", 1), f"{where}.c")
        rule = obj.get("rule", "vdc")
        if rule not in polyadic.REFINEMENT_RULES:
            raise SpecParseError(f"unknown refinement rule {rule!r}", field=f"{where}.rule")
        return _wrap(where, polyadic.example1_build, chain, c, rule)
    levels = _list(_get(obj, "levels", where), f"{where}.levels")
    specs = [decode_sequence(s, f"{where}.levels[{i}]") for i, s in enumerate(levels)]
    bounds = obj.get("bound_series")
    if bounds is not None:
        bounds = [decode_number(a, f"{where}.bound_series[{i}]")
                  for i, a in enumerate(_list(bounds, f"{where}.bound_series"))]
    return _wrap(where, polyadic.SequenceSystem, specs, bounds)


def decode_rule(obj, where="rule"):
    if obj is None:
        return partition.DecompositionRule()
    if isinstance(obj, str):
        obj = {"kind": obj}
    kind = _get(obj, "kind", where)
    if kind not in ("singleton", "every", "grid", "natural"):
        raise SpecParseError(f"unknown decomposition rule {kind!r}", field=f"{where}.kind")
    return partition.DecompositionRule(kind, int(obj.get("step", 1)), int(obj.get("base", 2)),
                                       obj.get("digits", "level"))


def loads(text, source="<input>"):
    """Parse JSON text, reporting syntax errors with line and column."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"{source}: {exc.msg}", field=source, line=exc.lineno,
                             column=exc.colno) from None
