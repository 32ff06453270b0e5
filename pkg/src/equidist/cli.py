"""Command-line entry point: ``equidist <command> --input spec.json ...``.

Each command reads one JSON document, runs one capability and writes CSV or
JSON.  Failures print a JSON error object on stderr and exit with 2 (parse
error), 3 (domain error) or 4 (resource cap).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import buck, independence, meanstats, partition, polyadic, seqcore, specjson
from .errors import EquidistError, SpecParseError
from .meanstats import ConvergenceTable, format_number

COMMANDS = ("gen", "mean", "udtest", "discrepancy", "buck", "osc", "indep", "partition-check")


def parse_horizons(text):
    try:
        hs = [int(float(h)) if "e" in h.lower() else int(h) for h in text.split(",") if h.strip()]
    except ValueError:
        raise SpecParseError(f"cannot parse horizons {text!r}", field="--horizons") from None
    if not hs or hs[0] < 1 or any(a >= b for a, b in zip(hs, hs[1:])):
        raise SpecParseError("horizons must be strictly increasing positive integers",
                             field="--horizons")
    return hs


def _spec_of(doc, key="spec"):
    if "kind" in doc and key == "spec":
        return specjson.decode_sequence(doc, "$")
    return specjson.decode_sequence(specjson._get(doc, key, "$"), f"$.{key}")


def _grid(doc):
    grid = doc.get("grid", {"dyadic": 6})
    if isinstance(grid, dict):
        return meanstats.dyadic_grid(specjson._int(grid.get("dyadic", 6), "$.grid.dyadic"))
    return [float(specjson.decode_number(x, f"$.grid[{i}]"))
            for i, x in enumerate(specjson._list(grid, "$.grid"))]


def _tables(tables, fmt, extra=None):
    if fmt == "json":
        body = {"tables": [t.to_dict() for t in tables]}
        if extra:
            body.update(extra)
        return json.dumps(body, indent=2) + "\n"
    if len(tables) == 1:
        return tables[0].to_csv()
    out = [tables[0].to_csv(with_name=True)]
    out += [t.to_csv(with_name=True).split("\n", 1)[1] for t in tables[1:]]
    return "".join(out)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# -- commands ---------------------------------------------------------------


def cmd_gen(doc, args):
    spec = _spec_of(doc)
    N = args.horizons[-1] if args.horizons else 16
    exact = bool(doc.get("exact", True))
    values = [seqcore.evaluate(spec, n, exact=None if exact else False) for n in range(1, N + 1)]
    if args.format == "json":
        return json.dumps({"values": [{"n": n, "value": format_number(v)}
                                      for n, v in enumerate(values, 1)]}, indent=2) + "\n"
    return _csv(["n", "value"], [(n, format_number(v)) for n, v in enumerate(values, 1)])


def cmd_mean(doc, args):
    spec = _spec_of(doc)
    g = specjson.decode_function(doc["g"], "$.g") if "g" in doc else meanstats.IDENTITY
    horizons = args.horizons or [1000]
    if "index" in doc:
        k = specjson.decode_index(doc["index"], "$.index")
        table = meanstats.subsequence_mean_test(spec, k, g, horizons, jobs=args.jobs)
    else:
        table = meanstats.mean_table(spec, horizons, g, jobs=args.jobs)
    return _tables([table], args.format)


def cmd_udtest(doc, args):
    if "index" in doc and "spec" not in doc:
        k = specjson.decode_index(doc["index"], "$.index")
        moduli = [specjson._int(m, f"$.moduli[{i}]")
                  for i, m in enumerate(specjson._list(specjson._get(doc, "moduli", "$"), "$.moduli"))]
        tables = meanstats.ud_in_Z_test(k, moduli, args.horizons or [max(moduli) * 100])
        return _tables(list(tables.values()), args.format)
    spec = _spec_of(doc)
    table = meanstats.ud_test(spec, args.horizons or [1024], _grid(doc), jobs=args.jobs)
    return _tables([table], args.format)


def cmd_discrepancy(doc, args):
    if "values" in doc:
        vals = [float(specjson.decode_number(v, f"$.values[{i}]"))
                for i, v in enumerate(specjson._list(doc["values"], "$.values"))]
        d = meanstats.star_discrepancy(vals)
        table = ConvergenceTable([(len(vals), d)], 0.0, "star_discrepancy")
    else:
        table = meanstats.discrepancy_table(_spec_of(doc), args.horizons or [1024], jobs=args.jobs)
    return _tables([table], args.format)


def _set_window(doc, window):
    src = specjson._get(doc, "set", "$")
    if isinstance(src, str):
        return buck.SetWindow.from_expression(src, window)
    if isinstance(src, dict):
        if "expression" in src:
            return buck.SetWindow.from_expression(src["expression"], window)
        if "builtin" in src:
            return buck.SetWindow.builtin(src["builtin"], window)
        if "file" in src:
            return buck.SetWindow.from_file(src["file"], window)
        if "members" in src:
            return buck.SetWindow.from_members(specjson._list(src["members"], "$.set.members"),
                                               window)
    raise SpecParseError("set must be an expression, or an object with expression/builtin/file/members",
                         field="$.set")


def cmd_buck(doc, args):
    window = specjson._int(doc.get("window", buck.DEFAULT_WINDOW), "$.window")
    A = _set_window(doc, window)
    strategy = args.strategy or doc.get("strategy", "exact")
    M = args.modulus_bound or doc.get("modulus_bound")
    cost, cover = buck.mu_upper_bound(A, M, strategy)
    M = M or (buck.DEFAULT_EXACT_BOUND if strategy == "exact" else buck.DEFAULT_GREEDY_BOUND)
    result = {"window": window, "modulus_bound": M, "strategy": strategy,
              "window_density": str(Fraction(len(A), window)), **cover.to_dict()}
    if doc.get("measurability"):
        result["measurability_gap"] = str(buck.measurability_gap(A, M, strategy))
    table = None
    if args.horizons:
        table = buck.asymptotic_density_estimate(A, args.horizons)
    if args.format == "json":
        if table is not None:
            result["density"] = table.to_dict()
        return json.dumps(result, indent=2) + "\n"
    out = _csv(["r", "m", "weight"], [(p["r"], p["m"], f"1/{p['m']}") for p in result["progressions"]])
    out += _csv(["key", "value"], [(k, result[k]) for k in
                                   ("cost", "window", "modulus_bound", "strategy", "window_density",
                                    "measurability_gap") if k in result])
    if table is not None:
        out += table.to_csv()
    return out


def cmd_osc(doc, args):
    horizons = args.horizons or [4096]
    if "system" in doc:
        system = specjson.decode_system(doc["system"], "$.system")
        depth = specjson._int(doc.get("depth", len(system.levels) - 1), "$.depth")
        rows = polyadic.uniform_limit_check(system, depth, horizons[-1], jobs=args.jobs)
        body = {"horizon": horizons[-1],
                "rows": [{"level": r.level, "sup_difference": r.sup_difference,
                          "bound": format_number(r.bound) if r.bound is not None else None,
                          "passed": r.passed} for r in rows]}
        try:
            body["mean_drift"] = [str(d) for d in polyadic.mean_drift(system)]
        except EquidistError:
            pass
        if args.format == "json":
            return json.dumps(body, indent=2) + "\n"
        return _csv(["level", "sup_difference", "bound", "passed"],
                    [(r["level"], r["sup_difference"], r["bound"], r["passed"]) for r in body["rows"]])
    spec = _spec_of(doc)
    if "prime_set" in doc:
        primes = specjson._list(doc["prime_set"], "$.prime_set")
        moduli = polyadic.semigroup_moduli(primes, specjson._int(doc.get("bound", 64), "$.bound"))
    else:
        moduli = [specjson._int(m, f"$.moduli[{i}]")
                  for i, m in enumerate(specjson._list(specjson._get(doc, "moduli", "$"), "$.moduli"))]
    profile = polyadic.oscillation_profile(spec, moduli, horizons, jobs=args.jobs)
    body = profile.to_dict()
    if args.epsilon is not None:
        found = polyadic.polyadic_modulus_search(spec, args.epsilon, moduli, horizons[-1])
        body["search"] = {"epsilon": args.epsilon, "horizon": horizons[-1],
                          "modulus": found if found is not None else "not-found"}
        body["exceptional_fraction"] = [
            {"modulus": m, "fraction": polyadic.exceptional_fraction(spec, m, horizons[-1],
                                                                     args.epsilon)}
            for m in moduli]
    if args.format == "json":
        return json.dumps(body, indent=2) + "\n"
    out = _csv(["modulus", "horizon", "oscillation"], profile.rows)
    if "search" in body:
        out += _csv(["epsilon", "horizon", "modulus"],
                    [(args.epsilon, horizons[-1], body["search"]["modulus"])])
    return out


def cmd_indep(doc, args):
    specs = [specjson.decode_sequence(s, f"$.specs[{i}]")
             for i, s in enumerate(specjson._list(specjson._get(doc, "specs", "$"), "$.specs"))]
    family = independence.DEFAULT_FAMILY
    if "family" in doc:
        family = tuple(specjson.decode_function(g, f"$.family[{i}]")
                       for i, g in enumerate(specjson._list(doc["family"], "$.family")))
    if doc.get("exact"):
        if len(specs) == 2 and all(isinstance(g, meanstats.Monomial) and g.degree == 1
                                   for g in family):
            joint, e1, e2 = independence.crt_product_mean_exact(*specs)
            body = {"joint_mean": str(joint), "means": [str(e1), str(e2)],
                    "gap": str(abs(joint - e1 * e2))}
        else:
            gaps = [independence.full_cycle_gap_exact(specs, [g] * len(specs)) for g in family]
            body = {"function_gaps": [{"function": g.label, "gap": str(v)}
                                      for g, v in zip(family, gaps)]}
        if args.format == "json":
            return json.dumps(body, indent=2) + "\n"
        return _csv(["key", "value"], [(k, json.dumps(v) if isinstance(v, list) else v)
                                       for k, v in body.items()])
    report = independence.independence_suite(specs, family, args.horizons or [1000],
                                             jobs=args.jobs)
    if args.format == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    return report.to_csv()


def cmd_partition_check(doc, args):
    sys_doc = specjson._get(doc, "system", "$")
    if args.seed is not None and isinstance(sys_doc, dict) and sys_doc.get("name") == "ragged":
        sys_doc = {**sys_doc, "params": {**sys_doc.get("params", {}), "seed": args.seed}}
    system = specjson.decode_partition(sys_doc, "$.system")
    levels = args.horizons or [specjson._int(N, f"$.levels[{i}]")
                               for i, N in enumerate(specjson._list(doc.get("levels", [1, 2, 3, 4]),
                                                                    "$.levels"))]
    rule = specjson.decode_rule(doc.get("rule"), "$.rule")
    un = partition.check_conditions_un(system, rule, levels, jobs=args.jobs)
    tables = un.tables()
    extra = {"degenerate_blocks": {str(k): v for k, v in un.degenerate.items()}}
    try:
        tables += partition.check_conditions_lim(system, rule, levels, jobs=args.jobs).tables()
    except EquidistError as exc:
        extra["lim_error"] = exc.to_dict()
    tables.append(partition.system_ud_test(system, levels, _grid(doc), jobs=args.jobs))
    return _tables(tables, args.format, extra if args.format == "json" else None)


HANDLERS = {"gen": cmd_gen, "mean": cmd_mean, "udtest": cmd_udtest, "discrepancy": cmd_discrepancy,
            "buck": cmd_buck, "osc": cmd_osc, "indep": cmd_indep,
            "partition-check": cmd_partition_check}


def build_parser():
    parser = argparse.ArgumentParser(prog="equidist",
                                     description="Finite-horizon equidistribution diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", "-i", required=True, help="JSON input document ('-' for stdin)")
        p.add_argument("--output", "-o", help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--horizons", type=str, default=None, help="comma-separated, increasing")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--modulus-bound", type=int, default=None)
        p.add_argument("--strategy", choices=("greedy", "exact"), default=None)
        p.add_argument("--epsilon", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
    return parser


def run(args):
    if args.jobs < 1:
        raise SpecParseError("--jobs must be >= 1", field="--jobs")
    args.horizons = parse_horizons(args.horizons) if args.horizons else None
    if args.input == "-":
        text, source = sys.stdin.read(), "<stdin>"
    else:
        try:
            text, source = Path(args.input).read_text(), args.input
        except OSError as exc:
            raise SpecParseError(f"cannot read input: {exc.strerror}", field="--input") from None
    doc = specjson.loads(text, source)
    if not isinstance(doc, dict):
        raise SpecParseError("input document must be a JSON object", field="$")
    out = HANDLERS[args.command](doc, args)
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except EquidistError as exc:
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return exc.exit_status


if __name__ == "__main__":
    sys.exit(main())
