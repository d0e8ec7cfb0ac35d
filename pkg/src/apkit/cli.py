"""Batch command line front end.

Subcommands: norm, scan, spectrum, eberlein, vanhove-check, classify,
gallery. Inputs come from flags or a JSON config file ("schema": 1, keys
named after the long flags with dashes as underscores; explicit flags win).
Results go to stdout or --out as JSON or CSV with all floats at 17
significant digits, so identical invocations produce identical bytes.

Exit codes: 0 success, 1 usage or input error, 2 numeric failure (exhausted
support, or non-convergence under --strict). Figure rendering is opt-in via
--figures DIR and never replaces the data output.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import serialize
from .convolution import eberlein
from .domain import (DomainSpec, SupportExhausted, VanHoveSequence, Window,
                     cyclic, integer_lattice, product, real_grid, torus_grid,
                     van_hove_report)
from .fourier_bohr import default_freq_grid, spectrum_scan
from .gallery import ClassifyConfig, GALLERY, classify, gallery_function, gallery_names
from .signals import GridFunction, character
from .stepanov import almost_period_scan, stepanov_norm
from .weyl import CONVERGED, equi_weyl_scan, weyl_seminorm


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the contract here reserves 2 for
    # numeric failures, so usage problems are rerouted
    def error(self, message):
        raise _UsageError(self.format_usage() + "error: " + message)


# -- grammar helpers -----------------------------------------------------------------

def parse_domain(text: str) -> DomainSpec:
    """kind:args per axis, ';'-separated axes.

    cyclic:N | integer:N[:ORIGIN] | real:N:H[:ORIGIN] | torus:N:H[:ORIGIN].
    A real axis without origin is centered on 0; a torus starts at 0.
    """
    parts = []
    for axis_text in text.split(";"):
        bits = axis_text.strip().split(":")
        kind = bits[0]
        try:
            if kind == "cyclic":
                (n,) = bits[1:]
                parts.append(cyclic(int(n)))
            elif kind == "integer":
                n, *rest = bits[1:]
                parts.append(integer_lattice(int(n), origin=float(rest[0]) if rest else 0.0))
            elif kind == "real":
                n, h, *rest = bits[1:]
                n, h = int(n), float(h)
                origin = float(rest[0]) if rest else -n * h / 2.0
                parts.append(real_grid(n, h, origin=origin))
            elif kind == "torus":
                n, h, *rest = bits[1:]
                parts.append(torus_grid(int(n), float(h),
                                        origin=float(rest[0]) if rest else 0.0))
            else:
                raise _UsageError(f"unknown domain kind {kind!r}")
        except (TypeError, ValueError) as e:
            raise _UsageError(f"bad domain spec {axis_text!r}: {e}") from e
    return parts[0] if len(parts) == 1 else product(*parts)


def parse_window(text: str, ndim: int) -> Window:
    offs, sides = [], []
    axes = text.split(",")
    if len(axes) != ndim:
        raise _UsageError(f"window has {len(axes)} axes, domain has {ndim}")
    for part in axes:
        try:
            lo, hi = (float(x) for x in part.split(":"))
        except ValueError as e:
            raise _UsageError(f"bad window part {part!r}; want LO:HI") from e
        if hi <= lo:
            raise _UsageError(f"window part {part!r} is empty")
        offs.append(lo)
        sides.append(hi - lo)
    return Window(tuple(offs), tuple(sides))


def parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError as e:
        raise _UsageError(f"bad range {text!r}; want LO:HI") from e
    return lo, hi


def _load_function(args) -> GridFunction:
    if getattr(args, "gallery", None):
        dom = parse_domain(args.domain) if args.domain else None
        return gallery_function(args.gallery, domain=dom,
                                h=getattr(args, "h", None),
                                span=getattr(args, "span", None))
    if getattr(args, "input", None):
        return _load_path(args.input, args.domain)
    raise _UsageError("need --input or --gallery")


def _load_path(path: str, domain_text: str | None) -> GridFunction:
    if path.endswith(".bin"):
        with open(path, "rb") as fp:
            blob = fp.read()
        dom = parse_domain(domain_text) if domain_text else None
        return serialize.parse_grid_bytes(blob, dom)
    if not domain_text:
        raise _UsageError("CSV input needs --domain")
    with open(path, "r", encoding="utf-8") as fp:
        text = fp.read()
    return serialize.parse_grid_csv(parse_domain(domain_text), text)


def _sequence(args, domain: DomainSpec) -> VanHoveSequence:
    return VanHoveSequence(domain, args.seq, args.base, args.nmax)


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fp:
            fp.write(text)
    else:
        sys.stdout.write(text)


def _strict_status(args, status: str) -> int:
    if args.strict and status != CONVERGED:
        print(f"not converged: status {status}", file=sys.stderr)
        return 2
    return 0


# -- subcommands ---------------------------------------------------------------------

def _cmd_norm(args) -> int:
    f = _load_function(args)
    if args.mode == "stepanov":
        k = parse_window(args.window or "0:1", f.domain.ndim)
        res = stepanov_norm(f, k, args.p)
        _emit(args, serialize.dump_json(res.to_json()))
        if args.figures:
            from . import plots
            plots.render_values(f, args.figures, "norm_input.png")
        return 0
    seq = _sequence(args, f.domain)
    probe_ys = tuple(args.probe_y or ())
    est = weyl_seminorm(f, seq, args.p, probe_ys=probe_ys, n_max=args.nmax,
                        tol=args.tol)
    if args.format == "csv":
        _emit(args, serialize.per_n_csv(est))
    else:
        _emit(args, serialize.dump_json(est.to_json()))
    if args.figures:
        from . import plots
        plots.render_per_n(est, args.figures, "norm_per_n.png")
    return _strict_status(args, est.status)


def _cmd_scan(args) -> int:
    f = _load_function(args)
    rng = parse_range(args.range)
    if args.mode == "stepanov":
        k = parse_window(args.window or "0:1", f.domain.ndim)
        report = almost_period_scan(f, k, args.p, args.epsilon, rng,
                                    stride=args.stride, gap_bound=args.gap_bound)
    else:
        seq = _sequence(args, f.domain)
        report = equi_weyl_scan(f, seq, args.p, args.epsilon, rng,
                                n_max=args.nmax, stride=args.stride,
                                gap_bound=args.gap_bound)
    if args.format == "csv":
        _emit(args, serialize.periods_csv(report))
    else:
        _emit(args, serialize.dump_json(report.to_json()))
    if args.figures:
        from . import plots
        plots.render_periods(report, args.figures, "scan_periods.png")
    return 0


def _parse_freqs(args, domain: DomainSpec):
    if args.freqs:
        out = []
        for part in args.freqs.split(","):
            try:
                out.append(character(*(float(x) for x in part.split("/"))))
            except ValueError as e:
                raise _UsageError(f"bad frequency {part!r}") from e
        return out
    return default_freq_grid(domain, args.freq_count)


def _cmd_spectrum(args) -> int:
    f = _load_function(args)
    seq = _sequence(args, f.domain)
    grid = _parse_freqs(args, f.domain)
    report = spectrum_scan(f, seq, freq_grid=grid, threshold=args.threshold,
                           n_max=args.nmax, tol=args.tol)
    if args.format == "json":
        _emit(args, serialize.dump_json(report.to_json()))
    else:
        _emit(args, serialize.spectrum_csv(report))
    if args.figures:
        from . import plots
        plots.render_spectrum(report, args.figures, "spectrum.png")
    return 0


def _cmd_eberlein(args) -> int:
    if not args.input or not args.input2:
        raise _UsageError("need --input and --input2")
    f = _load_path(args.input, args.domain)
    g = _load_path(args.input2, args.domain)
    seq = _sequence(args, f.domain)
    ew = parse_window(args.eval, 1) if args.eval else None
    res = eberlein(f, g, seq, eval_window=ew, n_max=args.nmax, tol=args.tol,
                   probe_xs=tuple(args.probe_x) if args.probe_x else None)
    if args.format == "csv":
        _emit(args, serialize.grid_csv(res.function))
    else:
        _emit(args, serialize.dump_json(res.to_json()))
    if args.figures:
        from . import plots
        plots.render_values(res.function, args.figures, "eberlein.png")
        plots.render_per_n(res.estimate, args.figures, "eberlein_per_n.png")
    return _strict_status(args, res.status)


def _cmd_vanhove(args) -> int:
    if args.domain:
        dom = parse_domain(args.domain)
    elif args.seq == "slab":
        # a slab needs a transverse axis to show its fixed edge
        dom = product(real_grid(4, 1.0, origin=-2.0), real_grid(4, 1.0, origin=-2.0))
    else:
        dom = real_grid(4, 1.0, origin=-2.0)
    seq = VanHoveSequence(dom, args.seq, args.base, args.nmax)
    k = parse_window(args.window, dom.ndim) if args.window \
        else Window((-1.0,) * dom.ndim, (2.0,) * dom.ndim)
    report = van_hove_report(seq, k, n_max=args.nmax, tolerance=args.tol)
    if args.format == "csv":
        _emit(args, serialize.vanhove_csv(report))
    else:
        _emit(args, serialize.dump_json(report.to_json()))
    if args.figures:
        from . import plots
        plots.render_vanhove(report, args.figures, "vanhove.png")
    return 0


def _cmd_classify(args) -> int:
    f = _load_function(args)
    kwargs = {}
    if args.epsilon is not None:
        kwargs["epsilon"] = args.epsilon
    if args.window:
        kwargs["window"] = parse_window(args.window, f.domain.ndim)
    if args.range:
        kwargs["scan_range"] = parse_range(args.range)
    if args.stride is not None:
        kwargs["stride"] = args.stride
    if args.gap_bound is not None:
        kwargs["gap_bound"] = args.gap_bound
    if args.uc_threshold is not None:
        kwargs["uc_threshold"] = args.uc_threshold
    cfg = ClassifyConfig(p=args.p, seq_rule=args.seq, base_side=args.base,
                         n_max=args.nmax, **kwargs)
    report = classify(f, cfg)
    if args.format == "csv":
        _emit(args, serialize.classify_csv(report))
    else:
        _emit(args, serialize.dump_json(report.to_json()))
    if args.figures:
        from . import plots
        plots.render_classify(report, args.figures, "classify.png")
    return 0


def _cmd_gallery(args) -> int:
    if args.action == "list":
        lines = [f"{name}\t{GALLERY[name].doc}" for name in gallery_names()]
        _emit(args, "\n".join(lines) + "\n")
        return 0
    if not args.name:
        raise _UsageError("gallery emit needs a name")
    dom = parse_domain(args.domain) if args.domain else None
    f = gallery_function(args.name, domain=dom, h=args.h, span=args.span)
    if args.format == "json":
        _emit(args, serialize.dump_json(
            {"name": args.name, "domain": f.domain.to_json(),
             "values": list(f.values.ravel())}))
    else:
        _emit(args, serialize.grid_csv(f))
    if args.figures:
        from . import plots
        plots.render_values(f, args.figures, f"gallery_{args.name}.png")
    return 0


# -- parser assembly -----------------------------------------------------------------

def _add_common(sp, default_format="json"):
    sp.add_argument("--out", help="write output to this file instead of stdout")
    sp.add_argument("--format", choices=("json", "csv"), default=default_format)
    sp.add_argument("--figures", metavar="DIR",
                    help="also render matplotlib figures into DIR")
    sp.add_argument("--config", help="JSON config file (schema 1)")
    sp.add_argument("--strict", action="store_true",
                    help="exit 2 when an estimate fails to converge")


def _add_input(sp):
    sp.add_argument("--input", help="grid function file (.csv or .bin)")
    sp.add_argument("--gallery", help="gallery function name")
    sp.add_argument("--domain", help="domain spec, e.g. cyclic:256 or real:4000:0.05")
    sp.add_argument("--h", type=float, help="gallery default-domain step")
    sp.add_argument("--span", type=float, help="gallery default-domain half width")


def _add_seq(sp):
    sp.add_argument("--seq", default="centered",
                    choices=("centered", "right", "left", "slab", "full"))
    sp.add_argument("--base", type=float, default=1.0)
    sp.add_argument("--nmax", type=int, default=32)
    sp.add_argument("--tol", type=float, default=1e-3)


def build_parser() -> _Parser:
    p = _Parser(prog="apkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    sp = sub.add_parser("norm",
                        help="Stepanov or Weyl norm of a grid function")
    _add_input(sp)
    _add_seq(sp)
    sp.add_argument("--mode", choices=("stepanov", "weyl"), default="stepanov")
    sp.add_argument("--p", type=float, default=1.0)
    sp.add_argument("--K", dest="window", help="norm window LO:HI[,LO:HI...]")
    sp.add_argument("--probe-y", type=float, action="append")
    _add_common(sp)
    sp.set_defaults(fn=_cmd_norm)

    sp = sub.add_parser("scan",
                        help="almost-period scan over a translate range")
    _add_input(sp)
    _add_seq(sp)
    sp.add_argument("--mode", choices=("stepanov", "equi-weyl"), default="stepanov")
    sp.add_argument("--p", type=float, default=1.0)
    sp.add_argument("--K", dest="window")
    sp.add_argument("--epsilon", type=float, required=True)
    sp.add_argument("--range", required=True, help="scan range LO:HI")
    sp.add_argument("--stride", type=float)
    sp.add_argument("--gap-bound", type=float)
    _add_common(sp)
    sp.set_defaults(fn=_cmd_scan)

    sp = sub.add_parser("spectrum",
                        help="Fourier-Bohr spectrum over a frequency grid")
    _add_input(sp)
    _add_seq(sp)
    sp.add_argument("--threshold", type=float)
    sp.add_argument("--freqs", help="explicit comma-separated frequencies "
                                    "(use / between axes of one character)")
    sp.add_argument("--freq-count", type=int)
    _add_common(sp, default_format="csv")
    sp.set_defaults(fn=_cmd_spectrum)

    sp = sub.add_parser("eberlein",
                        help="averaged convolution of two grid functions")
    _add_input(sp)
    sp.add_argument("--input2", help="right operand (.csv or .bin)")
    _add_seq(sp)
    sp.add_argument("--eval", help="evaluation window LO:HI (non-wrapping domains)")
    sp.add_argument("--probe-x", type=float, action="append")
    _add_common(sp)
    sp.set_defaults(fn=_cmd_eberlein)

    sp = sub.add_parser("vanhove-check",
                        help="boundary-to-bulk ratios of a window sequence")
    sp.add_argument("--domain")
    _add_seq(sp)
    sp.set_defaults(tol=0.05)
    sp.add_argument("--K", dest="window", help="probe window, default -1:1 per axis")
    _add_common(sp)
    sp.set_defaults(fn=_cmd_vanhove)

    sp = sub.add_parser("classify",
                        help="almost-periodicity class chain verdicts")
    _add_input(sp)
    _add_seq(sp)
    sp.add_argument("--p", type=float, default=1.0)
    sp.add_argument("--K", dest="window")
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--range", help="translate scan range LO:HI")
    sp.add_argument("--stride", type=float)
    sp.add_argument("--gap-bound", type=float)
    sp.add_argument("--uc-threshold", type=float)
    _add_common(sp)
    sp.set_defaults(fn=_cmd_classify)

    sp = sub.add_parser("gallery",
                        help="list or emit the example functions")
    sp.add_argument("action", choices=("list", "emit"))
    sp.add_argument("name", nargs="?")
    sp.add_argument("--domain")
    sp.add_argument("--h", type=float)
    sp.add_argument("--span", type=float)
    _add_common(sp, default_format="csv")
    sp.set_defaults(fn=_cmd_gallery)

    return p


def _apply_config(parser: _Parser, argv: list[str]) -> None:
    if "--config" not in argv:
        return
    path = argv[argv.index("--config") + 1] if argv.index("--config") + 1 < len(argv) else None
    if not path:
        raise _UsageError("--config needs a file path")
    try:
        with open(path, "r", encoding="utf-8") as fp:
            cfg = json.load(fp)
    except (OSError, json.JSONDecodeError) as e:
        raise _UsageError(f"cannot read config {path!r}: {e}") from e
    if not isinstance(cfg, dict) or cfg.pop("schema", None) != 1:
        raise _UsageError('config must be a JSON object with "schema": 1')
    # config keys behave as flag defaults; explicit flags still win
    known = set()
    for action_container in [parser] + [
            sp for action in parser._subparsers._group_actions
            for sp in action.choices.values()]:
        for a in action_container._actions:
            known.add(a.dest)
    unknown = [k for k in cfg if k.replace("-", "_") not in known]
    if unknown:
        raise _UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    defaults = {k.replace("-", "_"): v for k, v in cfg.items()}
    parser.set_defaults(**defaults)
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            sp.set_defaults(**{k: v for k, v in defaults.items()
                               if k in {a.dest for a in sp._actions}})


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise _UsageError(parser.format_usage() + "error: a subcommand is required")
        return args.fn(args)
    except _UsageError as e:
        print(str(e), file=sys.stderr)
        return 1
    except SupportExhausted as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
