"""Command line: one subcommand per experiment, one JSON report per run.

Reports go to stdout (or --out); tables go to CSV files under --csv. Exit codes
are 0 on success, 2 on invalid input, 3 on a resource cap, 4 when a construction
does not exist at the given parameters and may be retried with others.

:author: Shay Hill
:created: 2024-04-01
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from symdyn.caps import DEFAULT_CAPS, Caps
from symdyn.config import RunConfig, canonical_json, load_config
from symdyn.cylinders import CylinderUnion, block_partition, symbol_partition
from symdyn.entropy import cover_entropy, low_entropy_table, sft_entropy
from symdyn.errors import ArgumentError, PreconditionError, ResourceCapError
from symdyn.families import (
    BohrSpec,
    IntegerWindowSet,
    SequenceSpec,
    bohr_membership,
    classify_window,
    difference_set,
    recurrence_sweep,
    sip_set,
    weyl_average,
)
from symdyn.measures import (
    InvariantMeasure,
    MarkovMeasure,
    markov_family,
    uniform_markov,
)
from symdyn.mixing import (
    brute_force_flags,
    classify_sft,
    matrix_coefficient,
    n_set,
    poincare_return_masses,
    upe_witness,
)
from symdyn.recurrence import minimal_subsystem, wandering_profile
from symdyn.report import RunReport, digest, write_csv, write_text
from symdyn.subshifts import SFT
from symdyn.towers import (
    kakutani_skyscraper,
    kr_two_heights,
    nest_tower,
    return_times,
    uniformity_defect,
)
from symdyn.variational import attain_cover_entropy, evaluate_h_check, universal_rohlin
from symdyn.words import as_word

logger = logging.getLogger(__name__)

EXIT_INVALID = 2
EXIT_CAP = 3
EXIT_PRECONDITION = 4

_NO_CONFIG = "none"


@dataclasses.dataclass
class _Run:
    """What every command starts from."""

    args: argparse.Namespace
    caps: Caps
    config: RunConfig | None
    config_digest: str
    tables: dict[str, list[dict[str, Any]]] = dataclasses.field(default_factory=dict)

    def require_config(self) -> RunConfig:
        if self.config is None:
            msg = f"{self.args.command} needs --config"
            raise ArgumentError(msg)
        return self.config


def _plain(value: Any) -> Any:
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return dataclasses.asdict(value)
    return value


def _words(text: str) -> list[str]:
    return [w for w in text.replace(";", " ").split() if w]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def _cylinders(alphabet: int, text: str) -> CylinderUnion:
    """'01 10' is [01] | [10] at 0; 'X' is the whole space."""
    if text.strip().upper() == "X":
        return CylinderUnion.everything(alphabet)
    pairs = [(0, as_word(w)) for w in _words(text)]
    return CylinderUnion.from_cylinders(alphabet, pairs)


def _family(run: _Run, count: int = 3) -> list[MarkovMeasure]:
    """Configured Markov measures, or Parry, uniform and random chains on an SFT."""
    config = run.require_config()
    subshift = config.system.build(run.caps)
    if config.family:
        measures = [m.build(subshift) for m in config.family]
        for measure in measures:
            if not isinstance(measure, MarkovMeasure):
                msg = f"{measure.name} is not a Markov measure"
                raise ArgumentError(msg)
        return [m for m in measures if isinstance(m, MarkovMeasure)]
    if not isinstance(subshift, SFT):
        msg = "without a configured family, measures are built on SFTs only"
        raise ArgumentError(msg)
    return markov_family(subshift, count, run.args.seed)


def _any_measure(run: _Run) -> InvariantMeasure:
    """First configured measure of any kind, else the uniform split on an SFT."""
    config = run.require_config()
    if config.family:
        return config.family[0].build(config.system.build(run.caps))
    return _exact_measure(run)


def _exact_measure(run: _Run) -> MarkovMeasure:
    """First configured Markov measure, else the uniform split on an SFT."""
    config = run.require_config()
    if config.family:
        return _family(run)[0]
    subshift = config.system.build(run.caps)
    if not isinstance(subshift, SFT):
        msg = "a measure must be configured for a non-SFT system"
        raise ArgumentError(msg)
    return uniform_markov(subshift)


def cmd_entropy(run: _Run) -> dict[str, Any]:
    """Cover entropy with the SFT entropy beside it."""
    config = run.require_config()
    subshift = config.system.build(run.caps)
    if run.args.resolution:
        cover = block_partition(subshift, run.args.resolution)
    elif config.cover is not None:
        cover = config.cover.build(subshift)
    else:
        cover = symbol_partition(subshift)
    found = cover_entropy(subshift, cover, run.args.n_max, run.caps)
    run.tables["entropy"] = found.table()
    results: dict[str, Any] = {
        "system": subshift.describe(),
        "cover": cover.describe(),
        "estimate": found.estimate,
        "upper_bound": found.upper_bound,
        "growth": found.growth,
        "counts": {str(n): r for n, r in found.counts.items()},
    }
    if isinstance(subshift, SFT):
        exact = sft_entropy(subshift)
        results["sft_entropy"] = exact
        results["difference"] = found.estimate - exact
    return results


def cmd_lemma(run: _Run) -> dict[str, Any]:
    """Low-entropy word counts against exp(n (h + eps))."""
    args = run.args
    table = low_entropy_table(
        args.alphabet,
        range(args.n_min, args.n_max + 1),
        args.k,
        args.h,
        args.eps,
        run.caps,
    )
    rows = [dataclasses.asdict(r) for r in table.rows]
    run.tables["lemma"] = rows
    return {
        "alphabet": table.alphabet,
        "k": table.k,
        "h": table.h,
        "eps": table.eps,
        "threshold": table.threshold,
        "rows": rows,
    }


def _schedule(text: str) -> list[tuple[int, int]]:
    pairs: list[tuple[int, int]] = []
    for item in _words(text.replace(",", " ")):
        depth, _, window = item.partition(":")
        pairs.append((int(depth), int(window)))
    return pairs


def cmd_varprinciple(run: _Run) -> dict[str, Any]:
    """Cover entropy, the sup-inf and inf-sup of partition entropies, and a
    sequence of good points attaining the cover entropy."""
    config = run.require_config()
    subshift = config.system.build(run.caps)
    cover = (
        config.cover.build(subshift)
        if config.cover is not None
        else symbol_partition(subshift)
    )
    family = _family(run)
    resolution = run.args.resolution or 2
    check = evaluate_h_check(
        subshift, cover, family, resolution, run.args.n_max, caps=run.caps
    )
    attain = attain_cover_entropy(
        subshift,
        cover,
        _schedule(run.args.schedule),
        run.args.seed,
        run.args.tol,
        caps=run.caps,
    )
    return {"variational": check.describe(), "attain": attain.describe()}


def cmd_tower(run: _Run) -> dict[str, Any]:
    """Skyscrapers, two-height and nested towers, Rohlin sets, uniformity."""
    args = run.args
    config = run.require_config()
    subshift = config.system.build(run.caps)
    if args.kind == "rohlin":
        tower = universal_rohlin(
            subshift, args.n, args.delta, _family(run), args.horizon, run.caps
        )
        return tower.describe()
    if args.kind == "uniformity":
        partition = (
            block_partition(subshift, args.resolution)
            if args.resolution
            else symbol_partition(subshift)
        )
        report = uniformity_defect(
            subshift,
            partition,
            _any_measure(run),
            _ints(args.lengths),
            args.mode,
            seed=args.seed,
            caps=run.caps,
        )
        run.tables["uniformity"] = [
            {"length": n, "deviation": d, "witness": report.witnesses[n]}
            for n, d in sorted(report.deviations.items())
        ]
        return report.describe()
    measure = _exact_measure(run)
    if args.kind in {"skyscraper", "returns"}:
        base = _cylinders(subshift.alphabet, args.base)
        build = return_times if args.kind == "returns" else kakutani_skyscraper
        return build(subshift, base, measure, args.horizon, run.caps).describe()
    outer = kr_two_heights(subshift, measure, args.size, args.horizon, run.caps)
    if args.kind == "kr":
        return outer.describe()
    inner = nest_tower(subshift, outer, args.n, measure, run.caps)
    return {"outer": outer.describe(), "nested": inner.describe()}


def _sequence(args: argparse.Namespace, cap: int) -> SequenceSpec:
    values = tuple(_ints(args.values)) if args.values else ()
    return SequenceSpec(
        args.sequence, cap=cap, start=args.start, step=args.step, values=values
    )


def _window_result(found: IntegerWindowSet) -> dict[str, Any]:
    classification = classify_window(found)
    return {"set": found.describe(), "classification": classification.describe()}


def cmd_recur(run: _Run) -> dict[str, Any]:
    """Return-time sets, recurrence masses, and the window family calculus."""
    args = run.args
    what = args.what
    if what == "bohr":
        spec = BohrSpec(tuple(_words(args.freq)), Fraction(args.eps))
        found = bohr_membership(spec, args.horizon, run.caps)
        return _window_result(found)
    if what == "sip":
        found = sip_set(_ints(args.values), run.caps)
        return _window_result(found)
    if what == "difference":
        found = difference_set(_ints(args.values))
        return _window_result(found)
    if what == "rotation":
        hits = recurrence_sweep(
            _sequence(args, args.terms), _words(args.freq), Fraction(args.eps), run.caps
        )
        return {"hits": [h.describe() for h in hits]}
    config = run.require_config()
    subshift = config.system.build(run.caps)
    alphabet = subshift.alphabet
    if what == "nset":
        found = n_set(
            subshift,
            _cylinders(alphabet, args.u),
            _cylinders(alphabet, args.v),
            args.horizon,
            run.caps,
        )
        return _window_result(found)
    if what == "upe":
        witness = upe_witness(subshift, args.resolution or 1, caps=run.caps)
        return witness.describe()
    if what == "minimal":
        if not isinstance(subshift, SFT):
            msg = "minimal subsystems are computed for SFTs"
            raise ArgumentError(msg)
        return minimal_subsystem(subshift, args.max_word_length).describe()
    measure = _exact_measure(run)
    base = _cylinders(alphabet, args.base)
    if what == "poincare":
        masses = poincare_return_masses(
            measure, base, _sequence(args, args.terms), args.terms
        )
        return masses.describe()
    if what == "matrix":
        return matrix_coefficient(measure, base, args.terms).describe()
    return wandering_profile(subshift, base, measure, args.horizon).describe()


def cmd_weyl(run: _Run) -> dict[str, Any]:
    """|(1/n) sum exp(2 pi i alpha s_k)|; --radians reads alpha as the angle."""
    args = run.args
    angle = args.alpha if args.radians else f"2*pi*{args.alpha}"
    found = weyl_average(_sequence(args, args.n), angle, args.n, run.caps)
    return {"alpha": args.alpha, "angle": angle, **found.describe()}


def cmd_classify(run: _Run) -> dict[str, Any]:
    """Graph classification of an SFT with its window oracle."""
    config = run.require_config()
    subshift = config.system.build(run.caps)
    if not isinstance(subshift, SFT):
        msg = "classify needs an SFT"
        raise ArgumentError(msg)
    flags = classify_sft(subshift, run.args.horizon, run.caps)
    oracle = brute_force_flags(subshift, run.args.horizon)
    return {
        "classification": flags.describe(),
        "oracle": oracle.describe(),
        "agree": flags.transitive == oracle.transitive
        and flags.mixing == oracle.mixing,
    }


_COMMANDS: dict[str, Callable[[_Run], dict[str, Any]]] = {
    "entropy": cmd_entropy,
    "lemma": cmd_lemma,
    "varprinciple": cmd_varprinciple,
    "tower": cmd_tower,
    "recur": cmd_recur,
    "weyl": cmd_weyl,
    "classify": cmd_classify,
}


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON system description")
    common.add_argument("--out", type=Path, help="write the report here")
    common.add_argument("--csv", type=Path, help="directory for CSV tables")
    common.add_argument("--cap-states", type=int, default=DEFAULT_CAPS.max_states)
    common.add_argument("--resolution", type=int, default=0)
    common.add_argument(
        "--precision", type=int, default=DEFAULT_CAPS.precision_bits, help="bits"
    )
    common.add_argument("--no-timestamp", action="store_true")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--log-level", default="WARNING")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symdyn",
        description="Finite, checkable experiments in symbolic dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    entropy = sub.add_parser("entropy", parents=[common], help=cmd_entropy.__doc__)
    entropy.add_argument("--n-max", type=int, default=12)

    lemma = sub.add_parser("lemma", parents=[common], help=cmd_lemma.__doc__)
    lemma.add_argument("--alphabet", type=int, default=2)
    lemma.add_argument("--n-min", type=int, default=4)
    lemma.add_argument("--n-max", type=int, default=16)
    lemma.add_argument("--k", type=int, default=1)
    lemma.add_argument("--h", type=float, default=0.4)
    lemma.add_argument("--eps", type=float, default=0.2)

    varp = sub.add_parser("varprinciple", parents=[common], help="variational check")
    varp.add_argument("--n-max", type=int, default=10)
    varp.add_argument("--schedule", default="2:2000 4:4000", help="K:N pairs")
    varp.add_argument("--tol", type=float, default=0.05)

    tower = sub.add_parser("tower", parents=[common], help=cmd_tower.__doc__)
    tower.add_argument(
        "--kind",
        choices=["kr", "nest", "skyscraper", "returns", "rohlin", "uniformity"],
        default="kr",
    )
    tower.add_argument("--size", type=int, default=3, help="N of a two-height tower")
    tower.add_argument("--n", type=int, default=2)
    tower.add_argument("--delta", default="1/2")
    tower.add_argument("--base", default="0")
    tower.add_argument("--horizon", type=int, default=None)
    tower.add_argument("--lengths", default="16 64 256 1024")
    tower.add_argument("--mode", choices=["exhaustive", "sampled"], default="sampled")

    recur = sub.add_parser("recur", parents=[common], help=cmd_recur.__doc__)
    recur.add_argument(
        "--what",
        choices=[
            "nset",
            "poincare",
            "matrix",
            "wandering",
            "upe",
            "minimal",
            "bohr",
            "sip",
            "difference",
            "rotation",
        ],
        default="nset",
    )
    recur.add_argument("--u", default="0")
    recur.add_argument("--v", default="0")
    recur.add_argument("--base", default="0")
    recur.add_argument("--horizon", type=int, default=16)
    recur.add_argument("--terms", type=int, default=20)
    recur.add_argument("--max-word-length", type=int, default=4)
    recur.add_argument("--freq", default="sqrt2m1")
    recur.add_argument("--eps", default="1/20")
    recur.add_argument("--values", default="")
    recur.add_argument(
        "--sequence",
        choices=["squares", "arithmetic", "lacunary", "explicit"],
        default="squares",
    )
    recur.add_argument("--start", type=int, default=1)
    recur.add_argument("--step", type=int, default=1)

    weyl = sub.add_parser("weyl", parents=[common], help=cmd_weyl.__doc__)
    weyl.add_argument(
        "--sequence",
        choices=["squares", "arithmetic", "lacunary", "explicit"],
        default="squares",
    )
    weyl.add_argument("--alpha", default="sqrt2m1")
    weyl.add_argument("--radians", action="store_true")
    weyl.add_argument("--n", type=int, default=100_000)
    weyl.add_argument("--start", type=int, default=1)
    weyl.add_argument("--step", type=int, default=1)
    weyl.add_argument("--values", default="")

    classify = sub.add_parser("classify", parents=[common], help=cmd_classify.__doc__)
    classify.add_argument("--horizon", type=int, default=64)
    return parser


def _parameters(args: argparse.Namespace) -> dict[str, Any]:
    skip = {"config", "out", "csv", "log_level", "no_timestamp"}
    return {
        k: str(v) if isinstance(v, Path) else v
        for k, v in sorted(vars(args).items())
        if k not in skip
    }


def _tolerances(
    command: str, caps: Caps, args: argparse.Namespace
) -> dict[str, Any]:
    found: dict[str, Any] = {"float_comparisons": caps.tolerance}
    if command in {"entropy", "varprinciple"}:
        found["entropy_estimates"] = "finite-n, one-sided"
    if command == "varprinciple":
        found["attain"] = args.tol
    if command == "weyl":
        found["weyl"] = f"{caps.precision_bits}-bit phases, fsum"
    if command in {"tower", "recur", "classify"}:
        found["masses"] = "exact for rational chains"
    return found


def run_command(args: argparse.Namespace) -> RunReport:
    """Run a parsed command and return its report.

    :raise SymdynError: whatever the command raises
    """
    caps = DEFAULT_CAPS.replace(
        max_states=args.cap_states, precision_bits=args.precision
    )
    config = None
    config_digest = digest(_NO_CONFIG)
    if args.config is not None:
        config = load_config(args.config)
        config_digest = digest(canonical_json(config))
    run = _Run(args, caps, config, config_digest)
    report = RunReport(
        args.command,
        config_digest,
        _parameters(args),
        {},
        _tolerances(args.command, caps, args),
        caps,
    )
    results = _COMMANDS[args.command](run)
    report.results = {k: _plain(v) for k, v in results.items()}
    if args.csv is not None:
        for name, rows in run.tables.items():
            write_csv(Path(args.csv) / f"{args.command}_{name}.csv", rows)
    return report.finish()


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        report = run_command(args)
    except ArgumentError as err:
        print(f"symdyn: error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except ResourceCapError as err:
        print(f"symdyn: error: {err}", file=sys.stderr)
        return EXIT_CAP
    except PreconditionError as err:
        print(f"symdyn: error: {err}", file=sys.stderr)
        return EXIT_PRECONDITION
    text = report.to_json(timestamp=not args.no_timestamp)
    if args.out is not None:
        write_text(args.out, text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
