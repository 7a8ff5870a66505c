"""Command-line entry point: ``squeezent evolve|sweep|figure|steady|selftest``."""
import argparse
import json
import os
import sys

from . import __version__
from .errors import NumericalFailure
from .lindblad import ReservoirSpec
from .runner import FIGURES, OBSERVABLES, SWEEPABLE, RunConfig, SweepSpec, run_evolve, run_figure, run_steady, run_sweep

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

# flag dest -> flat RunConfig key
_FLAG_KEYS = {
    "topology": "topology",
    "init": "family",
    "n": "n",
    "alpha": "alpha",
    "psi": "psi",
    "N": "n_mean",
    "M": "m_mag",
    "theta": "theta",
    "kappa": "kappa",
    "tmax": "t_end",
    "step": "step",
    "nmax": "n_max",
    "samples": "samples",
    "observables": "observables",
    "out": "out",
}


def _shared(p):
    p.add_argument("--topology", choices=["separate", "common"])
    p.add_argument("--init", choices=["noon", "epr", "NOON", "EPR"])
    p.add_argument("--n", type=int, choices=[1, 2])
    p.add_argument("--alpha", type=float, help="mixing angle (rad)")
    p.add_argument("--psi", type=float, help="initial-state phase (rad)")
    p.add_argument("--N", type=float, help="reservoir mean photon number")
    p.add_argument("--M", type=float, help="squeezing correlation |M|")
    p.add_argument("--theta", type=float, help="squeezing phase (rad)")
    p.add_argument("--kappa", type=float, help="cavity damping rate (default 1)")
    p.add_argument("--tmax", type=float, help="final time (default 5)")
    p.add_argument("--step", type=float, help="RK4 step (default 1e-3)")
    p.add_argument("--samples", type=int, help="output time samples (default 500)")
    p.add_argument("--nmax", type=int, help="Fock cutoff per mode (default: n)")
    p.add_argument("--observables", help="comma list from: " + ",".join(OBSERVABLES))
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--config", help="flat JSON file of RunConfig keys; flags override it")
    p.add_argument("--threads", type=int, default=None, help="worker processes for sweeps")


def build_parser():
    parser = argparse.ArgumentParser(prog="squeezent", description=__doc__)
    parser.add_argument("--version", action="version", version=f"squeezent {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    _shared(sub.add_parser("evolve", help="single trajectory to CSV"))

    sw = sub.add_parser("sweep", help="one-parameter sweep to long-format CSV")
    _shared(sw)
    sw.add_argument("--param", required=True, choices=SWEEPABLE)
    sw.add_argument("--from", dest="start", type=float, required=True)
    sw.add_argument("--to", dest="stop", type=float, required=True)
    sw.add_argument("--points", type=int, default=60)
    sw.add_argument("--esd", choices=["concurrence", "log_negativity"],
                    help="add the sudden-death time of this measure as a column")

    fig = sub.add_parser("figure", help="figure preset dataset")
    fig.add_argument("id", choices=list(FIGURES))
    _shared(fig)
    fig.add_argument("--points", type=int, help="grid points of the swept parameter (default 60)")

    st = sub.add_parser("steady", help="single-mode steady-state report")
    _shared(st)
    st.add_argument("--csv", action="store_true", help="emit CSV instead of a text table")

    sub.add_parser("selftest", help="run the acceptance checks")
    return parser


def _flag_values(args):
    values = {}
    for dest, key in _FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            values[key] = value
    return values


def _load_config(path):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or any(isinstance(v, (dict, list)) for v in data.values()):
        raise ValueError("config file must be a flat JSON object")
    return data


def _config(args):
    values = _load_config(args.config) if args.config else {}
    values.update(_flag_values(args))
    return RunConfig.from_flat(values)


def _emit(ds, out):
    if out:
        ds.write(out)
    else:
        sys.stdout.write(ds.to_text())


def _threads(args):
    if args.threads is not None and args.threads < 1:
        raise ValueError("--threads must be >= 1")
    return args.threads or os.cpu_count() or 1


def _dispatch(args):
    if args.command == "selftest":
        from .acceptance import run_all
        results = run_all()
        failed = [r.number for r in results if not r.passed]
        print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
        return EXIT_OK if not failed else 1

    if args.command == "evolve":
        config = _config(args)
        ds = run_evolve(config)
        if not config.out:
            sys.stdout.write(ds.to_text())
        return EXIT_OK

    if args.command == "sweep":
        config = _config(args)
        spec = SweepSpec(args.param, args.start, args.stop, args.points, config, args.esd)
        ds = run_sweep(spec, _threads(args))
        if not config.out:
            sys.stdout.write(ds.to_text())
        return EXIT_OK

    if args.command == "figure":
        overrides = _load_config(args.config) if args.config else {}
        overrides.update(_flag_values(args))
        if args.points is not None:
            overrides["points"] = args.points
        ds = run_figure(args.id, overrides, _threads(args))
        if not overrides.get("out"):
            sys.stdout.write(ds.to_text())
        return EXIT_OK

    if args.command == "steady":
        values = _load_config(args.config) if args.config else {}
        values.update(_flag_values(args))
        n_mean = float(values.get("n_mean", values.get("n_mean_a", 0.0)))
        reservoir = ReservoirSpec(
            "separate", float(values.get("kappa", 1.0)), n_mean, None,
            float(values.get("m_mag", 0.0)), float(values.get("theta", 0.0)),
        )
        report = run_steady(reservoir, int(values.get("n_max", 12)))
        if args.csv or values.get("out"):
            _emit(report.to_dataset(), values.get("out"))
        else:
            sys.stdout.write(report.to_text())
        return EXIT_OK
    raise AssertionError(args.command)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError, TypeError) as exc:
        # UnphysicalParameters, BasisMismatch and malformed JSON are ValueErrors
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
