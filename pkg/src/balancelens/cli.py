"""Command-line front end: reproducible generate/analyze/predict pipelines.

Subcommands:
    generate     write a generated edge list (model, nodes, gamma, seed)
    analyze      edge list -> balance profile document (json or csv)
    predict      closed-form profile document for given (gamma, A, N, alpha)
    fit-compare  empirical profile vs theory document (or auto-fitted theory)
    slice        per-edge ratios around vertices of one in-degree
    degrees      in-degree histogram csv

Exit codes: 0 success, 1 usage or parameter error, 2 I/O error,
3 malformed input data (strict mode). Progress goes to stderr; stdout
carries machine-readable key/value summaries only. Every output gets a
JSON manifest sidecar at <out>.manifest (JSON documents embed the same
manifest too); runs with equal manifests produce byte-identical outputs.

The default bin base alpha is 10**0.1 and can be overridden with the
BALANCE_LENS_ALPHA environment variable.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import (BalanceLensError, ConfigError, EdgeListFormatError,
                     EstimationError, SingularGammaError,
                     UndefinedPositivityError, UsageError)
from .generator import MODELS, GeneratorConfig, generate
from .graph import build_graph, in_degree_histogram
from .ingest import read_edge_list, write_edge_list
from .metrics import (DEFAULT_ALPHA, balance_profile, degree_slice,
                      profile_from_json, profile_to_csv, profile_to_json)
from .theory import (TheoryParams, comparison_to_json, compare_profiles,
                     estimate_gamma, estimate_scale_A, theorem1_profile,
                     theory_from_json, theory_to_json)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_FORMAT = 3

ALPHA_ENV_VAR = "BALANCE_LENS_ALPHA"


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the documented contract is 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _default_alpha():
    raw = os.environ.get(ALPHA_ENV_VAR)
    if raw is None:
        return DEFAULT_ALPHA
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{ALPHA_ENV_VAR} must be a number, got {raw!r}")


def _progress(msg):
    print(msg, file=sys.stderr)


def _manifest(subcommand, params, inputs, outputs):
    return {
        "tool": "balance-lens",
        "version": __version__,
        "subcommand": subcommand,
        "parameters": params,
        "inputs": list(inputs),
        "outputs": list(outputs),
    }


def _write_sidecar(out_path, manifest):
    with open(f"{out_path}.manifest", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _write_text(out_path, text):
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load_graph(path, strict):
    edges, report = read_edge_list(path, strict=strict)
    if report.malformed_count:
        _progress(f"warning: skipped {report.malformed_count} malformed line(s), "
                  f"first at line {report.malformed_lines[0][0]}")
    if report.delimiter_fallbacks:
        _progress(f"note: {report.delimiter_fallbacks} line(s) used a non-tab delimiter")
    g, build = build_graph(edges)
    if build.self_loops_dropped or build.duplicate_edges_dropped:
        _progress(f"note: dropped {build.self_loops_dropped} self-loop(s) and "
                  f"{build.duplicate_edges_dropped} duplicate edge(s)")
    return g


def _positive_float(text):
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text}")
    return value


def _cmd_generate(args):
    cfg = GeneratorConfig(model=args.model, n_vertices=args.nodes, gamma=args.gamma,
                          seed=args.seed, k_cap=args.k_cap)
    if args.gamma <= 1.0:
        raise ConfigError(f"gamma must be > 1, got {args.gamma}")
    degree_sequence = None
    if args.model == "sequence":
        if not args.degree_file:
            raise ConfigError("model 'sequence' requires --degree-file")
        degree_sequence = np.loadtxt(args.degree_file, dtype=np.int64, ndmin=1)
    _progress(f"generating {args.model} network, N={args.nodes}, gamma={args.gamma}")
    g, assignment = generate(cfg, degree_sequence=degree_sequence)
    write_edge_list(g, args.out)
    manifest = _manifest("generate",
                         {"model": args.model, "nodes": args.nodes,
                          "gamma": args.gamma, "seed": args.seed,
                          "k_cap": cfg.effective_k_cap,
                          "degree_file": args.degree_file},
                         [args.degree_file] if args.degree_file else [],
                         [args.out])
    _write_sidecar(args.out, manifest)
    print(f"n_vertices {g.n_vertices}")
    print(f"n_edges {g.n_edges}")
    print(f"max_in_degree {int(g.in_degree.max()) if g.n_vertices else 0}")
    print(f"scale_a {assignment.scale_a!r}")
    return EXIT_OK


def _cmd_analyze(args):
    g = _load_graph(args.in_path, args.strict)
    if args.alpha <= 1.0:
        raise ConfigError(f"alpha must be > 1, got {args.alpha}")
    profile = balance_profile(g, alpha=args.alpha)
    if profile.positivity is None:
        _progress("warning: positivity undefined (no finite-ratio edges or N <= 2); "
                  "emitting null")
    manifest = _manifest("analyze",
                         {"alpha": args.alpha, "format": args.format,
                          "strict": args.strict},
                         [args.in_path], [args.out])
    if args.format == "json":
        _write_text(args.out, profile_to_json(profile, manifest=manifest))
    else:
        _write_text(args.out, profile_to_csv(profile))
    _write_sidecar(args.out, manifest)
    print(f"positivity {profile.positivity!r}")
    print(f"infinite_edges {profile.infinite_count}")
    return EXIT_OK


def _cmd_predict(args):
    params = TheoryParams(scale_a=args.scale_a, gamma=args.gamma,
                          n_vertices=args.nodes, alpha=args.alpha)
    theory = theorem1_profile(params, boundaries=(args.r_lo, args.r_hi))
    manifest = _manifest("predict",
                         {"gamma": args.gamma, "scale_a": args.scale_a,
                          "nodes": args.nodes, "alpha": args.alpha,
                          "r_lo": args.r_lo, "r_hi": args.r_hi},
                         [], [args.out])
    _write_text(args.out, theory_to_json(theory, manifest=manifest))
    _write_sidecar(args.out, manifest)
    for label, sec in theory.sections.items():
        print(f"exponent_{label} {sec.exponent!r}")
    return EXIT_OK


def _cmd_fit_compare(args):
    if (args.theory is None) == (args.auto is None):
        raise ConfigError("exactly one of --theory or --auto is required")
    with open(args.empirical, "r", encoding="utf-8") as fh:
        profile = profile_from_json(fh.read())

    if args.theory is not None:
        with open(args.theory, "r", encoding="utf-8") as fh:
            theory = theory_from_json(fh.read())
    else:
        g = _load_graph(args.auto, args.strict)
        hist = in_degree_histogram(g)
        gamma, gamma_se = estimate_gamma(hist, method="mle", k_min=args.k_min)
        scale_a = estimate_scale_A(hist, gamma, k_min=args.k_min)
        _progress(f"auto theory: gamma={gamma:.4f} (se {gamma_se:.4f}), "
                  f"A={scale_a:.1f}")
        params = TheoryParams(scale_a=scale_a, gamma=gamma,
                              n_vertices=g.n_vertices, alpha=profile.alpha)
        theory = theorem1_profile(params)

    report = compare_profiles(profile, theory, slope_tolerance=args.slope_tolerance)
    manifest = _manifest("fit-compare",
                         {"slope_tolerance": args.slope_tolerance,
                          "k_min": args.k_min, "strict": args.strict},
                         [args.empirical, args.theory or args.auto], [args.out])
    _write_text(args.out, comparison_to_json(report, manifest=manifest))
    _write_sidecar(args.out, manifest)
    for sec in report.sections:
        print(f"delta_{sec.label} "
              f"{'nan' if sec.delta is None else repr(sec.delta)}")
    return EXIT_OK


def _resolve_percentile_degree(g, percentile):
    if not 0 < percentile <= 100:
        raise ConfigError(f"percentile must be in (0, 100], got {percentile}")
    if g.n_vertices == 0:
        raise ConfigError("empty graph has no degree ranks")
    desc = np.sort(g.in_degree)[::-1]
    rank = max(1, math.ceil(percentile / 100.0 * g.n_vertices))
    return int(desc[rank - 1])


def _cmd_slice(args):
    if (args.k is None) == (args.top_percentile is None):
        raise ConfigError("exactly one of --k or --top-percentile is required")
    g = _load_graph(args.in_path, args.strict)
    k = args.k if args.k is not None else _resolve_percentile_degree(g, args.top_percentile)
    sl = degree_slice(g, k)
    lines = ["direction,source_d_i,target_d_i,ratio"]
    for d_src, ratio in zip(sl.in_source_degrees.tolist(), sl.in_edge_ratios.tolist()):
        lines.append(f"in,{d_src},{k},{ratio!r}" if math.isfinite(ratio)
                     else f"in,{d_src},{k},inf")
    for d_tgt, ratio in zip(sl.out_target_degrees.tolist(), sl.out_edge_ratios.tolist()):
        lines.append(f"out,{k},{d_tgt},{ratio!r}" if math.isfinite(ratio)
                     else f"out,{k},{d_tgt},inf")
    _write_text(args.out, "\n".join(lines) + "\n")
    manifest = _manifest("slice",
                         {"k": int(k), "top_percentile": args.top_percentile,
                          "strict": args.strict},
                         [args.in_path], [args.out])
    _write_sidecar(args.out, manifest)
    print(f"k {int(k)}")
    print(f"in_edges {sl.in_edge_ratios.size}")
    print(f"out_edges {sl.out_edge_ratios.size}")
    return EXIT_OK


def _cmd_degrees(args):
    g = _load_graph(args.in_path, args.strict)
    hist = in_degree_histogram(g)
    lines = ["k,count"]
    for k in sorted(hist.counts):
        lines.append(f"{k},{hist.counts[k]}")
    _write_text(args.out, "\n".join(lines) + "\n")
    manifest = _manifest("degrees", {"strict": args.strict},
                         [args.in_path], [args.out])
    _write_sidecar(args.out, manifest)
    print(f"n_vertices {hist.n_vertices}")
    print(f"distinct_degrees {len(hist.counts)}")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="balance-lens",
                     description="Directed-graph balance-ratio analytics")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("generate", help="generate a power-law network edge list")
    p.add_argument("--model", required=True, choices=MODELS)
    p.add_argument("--nodes", required=True, type=int)
    p.add_argument("--gamma", required=True, type=_positive_float)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--k-cap", type=int, default=None,
                   help="maximum in-degree (default N-1)")
    p.add_argument("--degree-file", default=None,
                   help="one target in-degree per line (model 'sequence')")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("analyze", help="balance profile of an edge list")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--alpha", type=_positive_float, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("predict", help="closed-form profile for given parameters")
    p.add_argument("--gamma", required=True, type=_positive_float)
    p.add_argument("--scale-a", dest="scale_a", required=True, type=_positive_float)
    p.add_argument("--nodes", required=True, type=int)
    p.add_argument("--alpha", type=_positive_float, default=None)
    p.add_argument("--r-lo", dest="r_lo", type=_positive_float, default=0.1)
    p.add_argument("--r-hi", dest="r_hi", type=_positive_float, default=10.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("fit-compare", help="compare a profile with theory")
    p.add_argument("--empirical", required=True, help="profile JSON document")
    p.add_argument("--theory", default=None, help="theory JSON document")
    p.add_argument("--auto", default=None,
                   help="edge list; gamma and A are fitted from its degrees")
    p.add_argument("--slope-tolerance", type=_positive_float, default=0.25)
    p.add_argument("--k-min", dest="k_min", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=_cmd_fit_compare)

    p = sub.add_parser("slice", help="edges around vertices of one in-degree")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--top-percentile", type=_positive_float, default=None,
                   help="resolve k by descending-degree rank")
    p.add_argument("--out", required=True)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=_cmd_slice)

    p = sub.add_parser("degrees", help="in-degree histogram csv")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=_cmd_degrees)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if hasattr(args, "alpha") and args.alpha is None:
            args.alpha = _default_alpha()
        return args.func(args)
    except EdgeListFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (ConfigError, SingularGammaError, EstimationError, UsageError,
            UndefinedPositivityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BalanceLensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
