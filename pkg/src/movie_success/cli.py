"""
Command-line entry point.

Usage:
    movie-success synth --n 1000 --signal 1.0 --seed 7 --output-dir out
    movie-success sir simulate --beta 0.10 --gamma 0.03 --s0 0.82 --i0 0.14 --r0 0.04
    movie-success sir fit --output-dir out
    movie-success sentiment extract --extractor stub --output-dir out
    movie-success featurize --mask SIR --output-dir out
    movie-success train --config run.json --output-dir out
    movie-success evaluate --checkpoint out/checkpoint.json --split test
    movie-success ablate --output-dir out
    movie-success predict --checkpoint out/checkpoint.json --features out/features_test.csv

Every run writes ``run_config.json`` and ``run.log`` into its output
directory. Errors end the process with the family's exit code and one
``error: {...}`` JSON line on stderr.
"""

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import pandas as pd
from dotenv import load_dotenv

from . import __version__
from .config import RunConfig
from .diffusion import simulate
from .errors import ContractViolation, MovieSuccessError
from .evaluation import (
    ablation_frame,
    cross_validate,
    cv_frame,
    default_ablation_specs,
    evaluate_params,
    fit_and_evaluate,
    holdout_split,
    metrics_frame,
    run_ablation,
    write_report,
)
from .features.assembler import FeatureMatrix
from .ingest import (
    PipelineState,
    Reject,
    generate_synthetic,
    load_movies,
    load_reviews,
    success_share,
    write_movies,
    write_rejects,
    write_reviews,
)
from .ingest.state import STATE_FILENAME
from .models import FeatureGroup, FeatureSchema, SIRParams, SIRState
from .network import Batch, load_checkpoint, predict, save_checkpoint
from .pipeline import build_film_table, extract_sentiments, group_reviews, save_sentiments, sir_fit_frame
from .preprocessing.dataset import FilmTable, prepare_matrices

logger = logging.getLogger("movie_success")

CSV_FLOAT_FORMAT = "%.10g"
CV_SPLIT_FOLDS = 10


class Run:
    """
    Output bookkeeping of one subcommand.

    Files registered through :meth:`output` are deleted again if the
    subcommand fails.
    """

    def __init__(self, args: argparse.Namespace, config: RunConfig):
        self.args = args
        self.config = config
        self.output_dir = Path(config.output_dir)
        self.progress = not args.quiet and sys.stderr.isatty()
        self.created: List[Path] = []

    def output(self, name: str) -> Path:
        path = self.output_dir / name
        if not path.exists():
            self.created.append(path)
        return path

    def cleanup(self):
        for path in reversed(self.created):
            if path.exists():
                path.unlink()
                logger.debug("Removed partial output %s", path)

    def default_path(self, value: Optional[str], name: str) -> Path:
        return Path(value) if value else self.output_dir / name

    @property
    def movies_path(self) -> Path:
        return self.default_path(self.config.movies_path, "movies.csv")

    @property
    def reviews_path(self) -> Path:
        return self.default_path(self.config.reviews_path, "reviews.csv")

    @property
    def sentiments_path(self) -> Path:
        return self.default_path(self.config.sentiments_path, "sentiments.jsonl")

    @property
    def mask(self) -> frozenset:
        return frozenset(FeatureGroup.parse(g) for g in self.config.mask)

    def status(self, message: str):
        if not self.args.quiet:
            print(message)

    def load_inputs(self):
        """Movies and reviews of the run; rejected rows go to rejects.csv."""
        rejects: List[Reject] = []
        movies = load_movies(self.movies_path, rejects)
        reviews = load_reviews(self.reviews_path, salt=self.config.salt, rejects=rejects)
        if rejects:
            write_rejects(self.output("rejects.csv"), rejects)
            logger.warning("%d rows rejected, see %s", len(rejects), self.output_dir / "rejects.csv")
        return movies, reviews

    def film_table(self) -> FilmTable:
        movies, reviews = self.load_inputs()
        config = self.config
        if config.sentiments_path is None and self.sentiments_path.exists():
            config = replace(config, sentiments_path=str(self.sentiments_path))
        return build_film_table(movies, reviews, None, config, progress=self.progress)


# -- subcommands --------------------------------------------------------------

def cmd_synth(run: Run) -> int:
    args = run.args
    movies, reviews = generate_synthetic(
        args.n,
        reviews_per_movie_range=(args.reviews_min, args.reviews_max),
        seed=run.config.seed,
        signal_strength=args.signal,
    )
    write_movies(run.output("movies.csv"), movies)
    write_reviews(run.output("reviews.csv"), reviews)
    run.status(
        f"✅ Generated {len(movies)} films ({100 * success_share(movies):.1f}% successful) "
        f"and {len(reviews)} reviews → {run.output_dir}"
    )
    return 0


def cmd_sir_simulate(run: Run) -> int:
    args = run.args
    initial = SIRState(s=args.s0, i=args.i0, r=args.r0)
    params = SIRParams(beta=args.beta, gamma=args.gamma)
    traj = simulate(initial, params, run.config.sir.dt, run.config.sir.horizon)
    path = run.output(args.output)
    pd.DataFrame(traj.as_array(), columns=["t", "s", "i", "r"]).to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    run.status(f"💾 Saved {len(traj)} states (R0 = {params.basic_reproduction_number:.4f}) → {path}")
    return 0


def cmd_sir_fit(run: Run) -> int:
    movies, reviews = run.load_inputs()
    frame = sir_fit_frame(movies, reviews, run.config)
    path = run.output("sir_params.csv")
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    run.status(f"💾 Saved SIR estimates for {len(frame)} films → {path}")
    return 0


def cmd_sentiment_extract(run: Run) -> int:
    config = run.config
    state = PipelineState.load(run.output_dir / STATE_FILENAME)
    inputs = [run.movies_path, run.reviews_path, run.output_dir / "run_config.json"]
    target = run.sentiments_path
    with state.lock():
        if state.is_fresh("sentiment", inputs) and target.exists():
            run.status(f"✅ Sentiment up to date → {target}")
            return 0
        movies, reviews = run.load_inputs()
        grouped = group_reviews(movies, reviews)
        vectors = extract_sentiments(grouped, reviews, config, progress=run.progress)
        if target.parent == run.output_dir:
            target = run.output(target.name)
        save_sentiments(target, grouped, vectors)
        state.mark_complete("sentiment", inputs, [target], seed=config.seed)
        state.save()
    run.status(f"💾 Saved sentiment of {len(vectors)} reviews → {target}")
    return 0


def cmd_featurize(run: Run) -> int:
    config = run.config
    state = PipelineState.load(run.output_dir / STATE_FILENAME)
    inputs = [run.movies_path, run.reviews_path, run.output_dir / "run_config.json"]
    if run.sentiments_path.exists():
        inputs.append(run.sentiments_path)
    names = ["features_train.csv", "features_test.csv", "feature_schema.json", "preprocessing.json"]

    with state.lock():
        if state.is_fresh("featurize", inputs):
            run.status(f"✅ Features up to date → {run.output_dir}")
            return 0
        table = run.film_table()
        plan = holdout_split(table, config)
        prepared = prepare_matrices(table, plan.train, plan.test, run.mask, config=config.features)
        train_path, test_path, schema_path, params_path = (run.output(n) for n in names)
        prepared.train.to_frame().to_csv(train_path, index=False, float_format=CSV_FLOAT_FORMAT)
        prepared.test.to_frame().to_csv(test_path, index=False, float_format=CSV_FLOAT_FORMAT)
        schema_path.write_text(FeatureSchema.default().masked(run.mask).to_json() + "\n", encoding="utf-8")
        fitted = {
            "preprocessing": prepared.preprocessor.params(),
            "target_scaler": prepared.target_scaler.to_dict(),
        }
        params_path.write_text(json.dumps(fitted, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        state.mark_complete("featurize", inputs, [train_path, test_path, schema_path, params_path], seed=config.seed)
        state.save()
    run.status(
        f"💾 Saved {prepared.train.width} features for {len(prepared.train)} training "
        f"and {len(prepared.test)} test films → {run.output_dir}"
    )
    return 0


def cmd_train(run: Run) -> int:
    config = run.config
    table = run.film_table()
    plan = holdout_split(table, config)
    result = fit_and_evaluate(table, plan.train, plan.test, config, run.mask, progress=run.progress)
    metadata = {
        "mask": sorted(g.value for g in run.mask),
        "train_rows": int(len(plan.train)),
        "test_rows": int(len(plan.test)),
        **result.train_report.to_dict(),
    }
    checkpoint = save_checkpoint(
        result.params,
        config.network_config(),
        run.output("checkpoint.json"),
        feature_names=result.prepared.train.names,
        metadata=metadata,
    )
    history = result.train_report.to_csv(run.output("train_history.csv"))
    run.status(f"💾 Saved checkpoint → {checkpoint}")
    run.status(f"💾 Saved training history ({result.train_report.last_epoch} epochs) → {history}")
    run.status(f"✅ Test accuracy {result.report.accuracy:.4f}, RMSE {result.report.rmse:.4f}")
    return 0


def cmd_evaluate(run: Run) -> int:
    config = run.config
    table = run.film_table()
    if run.args.split == "cv10":
        if run.args.checkpoint:
            logger.info("Cross-validation retrains every fold; the checkpoint is not used")
        summary = cross_validate(table, config, run.mask, k=CV_SPLIT_FOLDS, progress=run.progress)
        frame = cv_frame(summary)
        stem = "cv_report"
        accuracy = summary.mean.get("accuracy")
    else:
        if not run.args.checkpoint:
            raise ContractViolation("--checkpoint is required for --split test")
        checkpoint = load_checkpoint(run.args.checkpoint)
        mask = frozenset(FeatureGroup.parse(g) for g in (checkpoint.metadata or {}).get("mask", []))
        plan = holdout_split(table, config)
        prepared = prepare_matrices(table, plan.train, plan.test, mask, config=config.features)
        if prepared.test.names != tuple(checkpoint.feature_names):
            raise ContractViolation(
                "checkpoint was trained on different features",
                {"checkpoint": list(checkpoint.feature_names), "features": list(prepared.test.names)},
            )
        test = prepared.test
        report = evaluate_params(checkpoint.params, Batch.from_arrays(test.values, test.labels, test.targets))
        frame = metrics_frame([("test", report)])
        stem = "eval_report"
        accuracy = report.accuracy

    written = write_report(frame, run.output(f"{stem}.csv"), run.output(f"{stem}.txt"))
    run.status(f"✅ accuracy {accuracy:.4f}")
    run.status(f"💾 Saved report → {written[0]}")
    return 0


def cmd_ablate(run: Run) -> int:
    config = run.config
    specs = default_ablation_specs(config.ablations)
    table = run.film_table()
    rows = run_ablation(table, specs, config, progress=run.progress)
    written = write_report(ablation_frame(rows), run.output("ablation.csv"), run.output("ablation.txt"))
    for row in rows:
        run.status(f"   {row.spec.label:<24} {row.num_features:>3} features  accuracy {row.report.accuracy:.4f}")
    run.status(f"💾 Saved ablation table ({len(rows)} conditions) → {written[0]}")
    return 0


def cmd_predict(run: Run) -> int:
    args = run.args
    features = FeatureMatrix.from_frame(pd.read_csv(args.features))
    checkpoint = load_checkpoint(args.checkpoint, expected_width=features.width)
    if checkpoint.feature_names and features.names != tuple(checkpoint.feature_names):
        raise ContractViolation(
            "feature columns differ from the checkpoint's",
            {"checkpoint": list(checkpoint.feature_names), "features": list(features.names)},
        )
    prediction = predict(features.values, checkpoint.params)
    frame = pd.DataFrame(
        {
            "title": list(features.titles) if features.titles else range(len(features)),
            "probability": prediction.probability,
            "decision": prediction.decision.astype(int),
            "revenue_scaled": prediction.revenue_scaled,
        }
    )
    path = run.output(args.output)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    run.status(f"💾 Saved {len(frame)} predictions → {path}")
    return 0


# -- argument parsing ---------------------------------------------------------

def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="JSON run configuration")
    common.add_argument("-o", "--output-dir", default=None, help="Directory for every output of the run")
    common.add_argument("--seed", type=int, default=None, help="Root seed")
    common.add_argument("--movies", default=None, help="movies.csv (default: <output-dir>/movies.csv)")
    common.add_argument("--reviews", default=None, help="reviews.csv (default: <output-dir>/reviews.csv)")
    common.add_argument("--sentiments", default=None, help="Sentiment JSON-lines file")
    common.add_argument("--n-jobs", type=int, default=None, help="Parallel folds or ablation conditions")
    common.add_argument("--mask", nargs="*", default=None, metavar="GROUP", help="Feature groups to drop: SIR Sentiment Events")
    common.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("-q", "--quiet", action="store_true", help="No status lines or progress bars")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="movie-success",
        description="Movie success prediction from review diffusion, sentiment and a multi-task network.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", parents=[common], help="Generate a planted-signal corpus")
    synth.add_argument("--n", type=int, default=1000, help="Number of films")
    synth.add_argument("--signal", type=float, default=1.0, help="Signal strength in [0, 1]")
    synth.add_argument("--reviews-min", type=int, default=20)
    synth.add_argument("--reviews-max", type=int, default=60)
    synth.set_defaults(handler=cmd_synth)

    sir = sub.add_parser("sir", help="SIR diffusion tools")
    sir_sub = sir.add_subparsers(dest="sir_command", required=True)
    sim = sir_sub.add_parser("simulate", parents=[common], help="Integrate one trajectory")
    sim.add_argument("--beta", type=float, required=True)
    sim.add_argument("--gamma", type=float, required=True)
    sim.add_argument("--s0", type=float, required=True)
    sim.add_argument("--i0", type=float, required=True)
    sim.add_argument("--r0", type=float, required=True)
    sim.add_argument("--dt", type=float, default=None)
    sim.add_argument("--horizon", type=float, default=None)
    sim.add_argument("--output", default="sir_trajectory.csv", help="File name inside the output directory")
    sim.set_defaults(handler=cmd_sir_simulate)
    fit = sir_sub.add_parser("fit", parents=[common], help="Estimate initial state and rates per film")
    fit.set_defaults(handler=cmd_sir_fit)

    sentiment = sub.add_parser("sentiment", help="Review sentiment tools")
    sentiment_sub = sentiment.add_subparsers(dest="sentiment_command", required=True)
    extract = sentiment_sub.add_parser("extract", parents=[common], help="Extract per-review sentiment")
    extract.add_argument("--extractor", choices=["stub", "remote"], default=None)
    extract.set_defaults(handler=cmd_sentiment_extract)

    featurize = sub.add_parser("featurize", parents=[common], help="Write train/test feature matrices")
    featurize.set_defaults(handler=cmd_featurize)

    train = sub.add_parser("train", parents=[common], help="Train and checkpoint the network")
    train.set_defaults(handler=cmd_train)

    evaluate = sub.add_parser("evaluate", parents=[common], help="Evaluate on the test split or by 10-fold CV")
    evaluate.add_argument("--checkpoint", default=None)
    evaluate.add_argument("--split", choices=["test", "cv10"], default="test")
    evaluate.set_defaults(handler=cmd_evaluate)

    ablate = sub.add_parser("ablate", parents=[common], help="Retrain with feature groups removed")
    ablate.add_argument("--conditions", nargs="*", default=None, metavar="LABEL")
    ablate.set_defaults(handler=cmd_ablate)

    pred = sub.add_parser("predict", parents=[common], help="Score a feature file with a checkpoint")
    pred.add_argument("--checkpoint", required=True)
    pred.add_argument("--features", required=True)
    pred.add_argument("--output", default="predictions.csv", help="File name inside the output directory")
    pred.set_defaults(handler=cmd_predict)

    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file values overridden by command-line flags."""
    config = RunConfig.load(args.config)
    overrides: Dict[str, object] = {
        "output_dir": args.output_dir,
        "seed": args.seed,
        "movies_path": args.movies,
        "reviews_path": args.reviews,
        "sentiments_path": args.sentiments,
        "n_jobs": args.n_jobs,
        "mask": args.mask,
        "ablations": getattr(args, "conditions", None),
    }
    config = replace(config, **{k: v for k, v in overrides.items() if v is not None})
    if getattr(args, "extractor", None):
        config = replace(config, extractor=replace(config.extractor, mode=args.extractor))
    sir_overrides = {k: getattr(args, k, None) for k in ("dt", "horizon")}
    if any(v is not None for v in sir_overrides.values()):
        config = replace(config, sir=replace(config.sir, **{k: v for k, v in sir_overrides.items() if v is not None}))
    return config


def configure_logging(level: str, output_dir: Path) -> logging.Handler:
    """Console handler with bare messages plus a timestamped run.log."""
    root = logging.getLogger("movie_success")
    root.setLevel(logging.DEBUG)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    console = logging.StreamHandler(sys.stderr)
    console.setLevel(level)
    console.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    root.addHandler(console)

    output_dir.mkdir(parents=True, exist_ok=True)
    file_handler = logging.FileHandler(output_dir / "run.log", encoding="utf-8")
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    root.addHandler(file_handler)
    return file_handler


def _error_line(payload: Dict[str, object]):
    print("error: " + json.dumps(payload, sort_keys=True, default=str), file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    handler: Callable[[Run], int] = args.handler

    try:
        config = resolve_config(args)
    except MovieSuccessError as exc:
        _error_line(exc.to_dict())
        return exc.exit_code

    run = Run(args, config)
    file_handler = configure_logging(args.log_level, run.output_dir)
    try:
        config.save(run.output_dir / "run_config.json")
        logger.debug("Running %s with seed %d", args.command, config.seed)
        return handler(run)
    except MovieSuccessError as exc:
        run.cleanup()
        logger.debug("%s failed", args.command, exc_info=True)
        run.status(f"❌ {exc.message}")
        _error_line(exc.to_dict())
        return exc.exit_code
    except Exception as exc:
        run.cleanup()
        logger.exception("Unexpected failure in %s", args.command)
        _error_line({"type": exc.__class__.__name__, "code": 1, "message": str(exc), "details": {}})
        return 1
    finally:
        logging.getLogger("movie_success").removeHandler(file_handler)
        file_handler.close()


if __name__ == "__main__":
    sys.exit(main())
