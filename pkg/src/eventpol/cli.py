"""Command-line front end: summarize, score, series, event, train, predict, evaluate.

Config precedence is CLI flag > config file > built-in default, and the
effective configuration is echoed into the output directory next to the
results, so every artifact records how it was produced. All commands
are deterministic given (inputs, config, seed): outputs carry no
timestamps and float fields are written with full round-trip precision.

Exit codes: 0 success, 1 validation error (bad flags, unreadable or
malformed inputs), 2 computation error.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import click
import yaml

from . import corpus as corpus_mod
from . import eventstat, metrics, reactions, textprep
from .errors import ComputationError, EmptyCorpusError, ValidationError
from .series import daily_aggregate, score_records, series_to_csv
from .valence import ValenceConfig, ValenceScorer, classify_polarity, default_lexicon, load_lexicon

DEFAULTS: dict = {
    "corpus": None,
    "format": None,
    "lexicon": None,
    "stoplist": None,
    "lemmas": None,
    "events": None,
    "model": None,
    "out_dir": "out",
    "group": None,
    "window_days": 15,
    "significance": 0.05,
    "alpha": 15.0,
    "pos_threshold": 0.05,
    "neg_threshold": -0.05,
    "prep_before_scoring": False,
    "min_df": 2,
    "learning_rate": 0.1,
    "epochs": 500,
    "l2": 1e-3,
    "tol": 1e-7,
    "seed": 42,
    "balanced_class_weights": False,
}


def _load_config_file(path: str) -> dict:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ValidationError(f"config file {path} is not valid YAML/JSON: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValidationError(f"config file {path} must hold a mapping at the top level")
    unknown = sorted(set(data) - set(DEFAULTS))
    if unknown:
        raise ValidationError(f"config file {path} has unknown key(s): {', '.join(unknown)}")
    return data


def resolve_config(config_path: Optional[str], cli_values: dict) -> dict:
    """CLI flag > config file > default, for every known key."""
    cfg = dict(DEFAULTS)
    if config_path:
        cfg.update(_load_config_file(config_path))
    cfg.update({k: v for k, v in cli_values.items() if v is not None})
    return cfg


def _prepare_out_dir(cfg: dict, command: str) -> Path:
    out_dir = Path(cfg["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    echo = {"command": command, **{k: cfg[k] for k in sorted(cfg)}}
    (out_dir / "effective_config.json").write_text(
        json.dumps(echo, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return out_dir


def _require(cfg: dict, key: str, flag: str) -> str:
    value = cfg.get(key)
    if not value:
        raise ValidationError(f"missing required input: pass {flag} or set {key!r} in the config file")
    return value


def _load_records(cfg: dict) -> list[corpus_mod.TweetRecord]:
    path = _require(cfg, "corpus", "--corpus")
    result = corpus_mod.load_corpus(path, format=cfg["format"])
    if result.rejections:
        click.echo(f"note: {len(result.rejections)} malformed row(s) rejected", err=True)
        for rej in result.rejections[:10]:
            click.echo(f"  row {rej.row}: {rej.reason}", err=True)
        if len(result.rejections) > 10:
            click.echo(f"  ... and {len(result.rejections) - 10} more", err=True)
    if not result.records:
        raise EmptyCorpusError(f"no records loaded from {path}")
    return result.records


def _valence_config(cfg: dict) -> ValenceConfig:
    return ValenceConfig(
        alpha=float(cfg["alpha"]),
        pos_threshold=float(cfg["pos_threshold"]),
        neg_threshold=float(cfg["neg_threshold"]),
    )


def _scorer(cfg: dict) -> ValenceScorer:
    lexicon = load_lexicon(cfg["lexicon"]) if cfg["lexicon"] else default_lexicon()
    return ValenceScorer(lexicon, config=_valence_config(cfg))


def _prep(cfg: dict):
    stoplist = (
        textprep.load_stoplist(cfg["stoplist"]) if cfg["stoplist"] else textprep.default_stoplist()
    )
    lemmas = (
        textprep.load_lemma_dict(cfg["lemmas"]) if cfg["lemmas"] else textprep.default_lemma_dict()
    )
    return lambda text: textprep.prep_for_features(text, stoplist, lemmas)


def _score_all(cfg: dict, records):
    scorer = _scorer(cfg)
    if cfg["prep_before_scoring"]:
        prep = _prep(cfg)
        return score_records(records, scorer, text_of=lambda r: " ".join(prep(r.text)))
    return score_records(records, scorer)


def _group_slug(group: str) -> str:
    slug = "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in group)
    return slug or "ungrouped"


def _write(out_dir: Path, name: str, text: str) -> Path:
    path = out_dir / name
    path.write_text(text, encoding="utf-8")
    return path


_config_option = click.option("--config", "config_path", type=str, default=None,
                              help="YAML/JSON config file; flags override it.")
_corpus_option = click.option("--corpus", type=str, default=None, help="Corpus CSV or JSONL file.")
_format_option = click.option("--format", "format_", type=click.Choice(["csv", "jsonl"]),
                              default=None, help="Corpus format (default: from file suffix).")
_out_option = click.option("--out-dir", type=str, default=None, help="Output directory (default ./out).")
_lexicon_option = click.option("--lexicon", type=str, default=None,
                               help="Sentiment lexicon file (default: packaged English lexicon).")


@click.group()
def cli() -> None:
    """Event-driven sentiment analysis of timestamped short texts."""


@cli.command()
@_config_option
@_corpus_option
@_format_option
@_out_option
@click.option("--group", type=str, default=None, help="Summarize only this group.")
def summarize(config_path, corpus, format_, out_dir, group) -> None:
    """Per-group corpus summary: day coverage and tweet volume."""
    cfg = resolve_config(config_path, {"corpus": corpus, "format": format_,
                                       "out_dir": out_dir, "group": group})
    records = _load_records(cfg)
    out = _prepare_out_dir(cfg, "summarize")
    groups = [cfg["group"]] if cfg["group"] else sorted(corpus_mod.groups_in(records))
    summaries = []
    for g in groups:
        subset = corpus_mod.filter_records(records, group=g)
        if not subset:
            raise EmptyCorpusError(f"no records for group {g!r}")
        summaries.append(corpus_mod.summarize(subset, g))

    rows = [("group", "totalDays", "minPerDay", "maxPerDay", "avgPerDay", "totalTweets")]
    for s in summaries:
        rows.append((s.group, str(s.total_days), str(s.min_per_day), str(s.max_per_day),
                     f"{s.avg_per_day:.2f}", str(s.total_tweets)))
    widths = [max(len(r[i]) for r in rows) for i in range(6)]
    text = "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows) + "\n"
    payload = [
        {"group": s.group, "totalDays": s.total_days, "minPerDay": s.min_per_day,
         "maxPerDay": s.max_per_day, "avgPerDay": s.avg_per_day, "totalTweets": s.total_tweets}
        for s in summaries
    ]
    _write(out, "summary.txt", text)
    _write(out, "summary.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")
    click.echo(text, nl=False)


@cli.command()
@_config_option
@_corpus_option
@_format_option
@_lexicon_option
@_out_option
@click.option("--stoplist", type=str, default=None, help="Stoplist file (default packaged).")
@click.option("--lemmas", type=str, default=None, help="Lemma dictionary file (default packaged).")
@click.option("--prep-before-scoring", is_flag=True, default=None,
              help="Score preprocessed text instead of raw text (raw is the default because the "
                   "rule engine needs casing and punctuation).")
def score(config_path, corpus, format_, lexicon, out_dir, stoplist, lemmas, prep_before_scoring) -> None:
    """Valence-score every record; writes scores.csv."""
    cfg = resolve_config(config_path, {
        "corpus": corpus, "format": format_, "lexicon": lexicon, "out_dir": out_dir,
        "stoplist": stoplist, "lemmas": lemmas, "prep_before_scoring": prep_before_scoring,
    })
    records = _load_records(cfg)
    out = _prepare_out_dir(cfg, "score")
    scored = _score_all(cfg, records)
    vcfg = _valence_config(cfg)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "date", "group", "compound", "pos", "neu", "neg", "polarity"])
    for record, s in scored:
        writer.writerow([record.id, record.date.isoformat(), record.group,
                         repr(s.compound), repr(s.pos), repr(s.neu), repr(s.neg),
                         classify_polarity(s, vcfg)])
    path = _write(out, "scores.csv", buf.getvalue())
    click.echo(f"wrote {path}")


@cli.command()
@_config_option
@_corpus_option
@_format_option
@_lexicon_option
@_out_option
@click.option("--group", type=str, default=None, help="Build series only for this group.")
def series(config_path, corpus, format_, lexicon, out_dir, group) -> None:
    """Daily meanPol / pnRatio series per group; one CSV per group."""
    cfg = resolve_config(config_path, {"corpus": corpus, "format": format_, "lexicon": lexicon,
                                       "out_dir": out_dir, "group": group})
    records = _load_records(cfg)
    out = _prepare_out_dir(cfg, "series")
    groups = [cfg["group"]] if cfg["group"] else sorted(corpus_mod.groups_in(records))
    vcfg = _valence_config(cfg)
    for g in groups:
        subset = corpus_mod.filter_records(records, group=g)
        if not subset:
            raise EmptyCorpusError(f"no records for group {g!r}")
        scored = _score_all(cfg, subset)
        polarity_series = daily_aggregate(scored, vcfg)
        path = out / f"series_{_group_slug(g)}.csv"
        series_to_csv(polarity_series, path)
        click.echo(f"wrote {path}")


@cli.command()
@_config_option
@_corpus_option
@_format_option
@_lexicon_option
@_out_option
@click.option("--events", type=str, default=None, help="Events CSV (name,group,date).")
@click.option("--window-days", type=int, default=None, help="Window size k in days (default 15).")
@click.option("--significance", type=float, default=None,
              help="Significance level for report flags (default 0.05).")
def event(config_path, corpus, format_, lexicon, out_dir, events, window_days, significance) -> None:
    """Before/after window statistics and Welch tests per event."""
    cfg = resolve_config(config_path, {
        "corpus": corpus, "format": format_, "lexicon": lexicon, "out_dir": out_dir,
        "events": events, "window_days": window_days, "significance": significance,
    })
    records = _load_records(cfg)
    event_list = eventstat.load_events(_require(cfg, "events", "--events"))
    out = _prepare_out_dir(cfg, "event")
    vcfg = _valence_config(cfg)
    series_by_group = {}
    for g in sorted({e.group for e in event_list}):
        subset = corpus_mod.filter_records(records, group=g)
        if subset:
            series_by_group[g] = daily_aggregate(_score_all(cfg, subset), vcfg)
    report = eventstat.event_report(
        series_by_group, event_list, k=int(cfg["window_days"]),
        alpha=float(cfg["significance"]),
    )
    _write(out, "event_report.json", report.to_json() + "\n")
    text = report.to_text()
    _write(out, "event_report.txt", text)
    click.echo(text, nl=False)


@cli.command()
@_config_option
@_corpus_option
@_format_option
@_out_option
@click.option("--stoplist", type=str, default=None, help="Stoplist file (default packaged).")
@click.option("--lemmas", type=str, default=None, help="Lemma dictionary file (default packaged).")
@click.option("--min-df", type=int, default=None, help="Vocabulary document-frequency cutoff (default 2).")
@click.option("--learning-rate", type=float, default=None, help="Gradient-descent step size (default 0.1).")
@click.option("--epochs", type=int, default=None, help="Maximum training epochs (default 500).")
@click.option("--l2", type=float, default=None, help="Ridge penalty on weights (default 1e-3).")
@click.option("--tol", type=float, default=None, help="Early-stop threshold on loss delta (default 1e-7).")
@click.option("--seed", type=int, default=None, help="Seed for weight initialization (default 42).")
@click.option("--balanced-class-weights", is_flag=True, default=None,
              help="Weight classes inversely to frequency in the loss (off by default).")
def train(config_path, corpus, format_, out_dir, stoplist, lemmas, min_df, learning_rate,
          epochs, l2, tol, seed, balanced_class_weights) -> None:
    """Train the reaction classifier on the corpus rows that carry labels."""
    cfg = resolve_config(config_path, {
        "corpus": corpus, "format": format_, "out_dir": out_dir, "stoplist": stoplist,
        "lemmas": lemmas, "min_df": min_df, "learning_rate": learning_rate, "epochs": epochs,
        "l2": l2, "tol": tol, "seed": seed, "balanced_class_weights": balanced_class_weights,
    })
    records = _load_records(cfg)
    labeled = [r for r in records if r.label is not None]
    if not labeled:
        raise ValidationError("no labeled rows in corpus; training needs the label column populated")
    out = _prepare_out_dir(cfg, "train")
    prep = _prep(cfg)
    docs = [prep(r.text) for r in labeled]
    labels = [r.label for r in labeled]
    classes = sorted(set(labels))
    vocab = reactions.build_vocabulary(docs, min_df=int(cfg["min_df"]))
    config = reactions.TrainConfig(
        learning_rate=float(cfg["learning_rate"]), epochs=int(cfg["epochs"]), l2=float(cfg["l2"]),
        tol=float(cfg["tol"]), seed=int(cfg["seed"]),
        balanced_class_weights=bool(cfg["balanced_class_weights"]),
    )
    X = [reactions.vectorize(doc, vocab) for doc in docs]
    model = reactions.train(X, labels, classes, config, vocab)
    path = out / "model.json"
    reactions.save_model(model, path)
    click.echo(
        f"wrote {path} (classes={','.join(classes)} vocab={len(vocab)} "
        f"loss={model.final_loss:.6f} epochs={model.epochs_run})"
    )


@cli.command()
@_config_option
@_corpus_option
@_format_option
@_out_option
@click.option("--model", "model_path", type=str, default=None, help="Trained model JSON file.")
@click.option("--stoplist", type=str, default=None, help="Stoplist file (default packaged).")
@click.option("--lemmas", type=str, default=None, help="Lemma dictionary file (default packaged).")
def predict(config_path, corpus, format_, out_dir, model_path, stoplist, lemmas) -> None:
    """Classify every record; writes predictions.csv."""
    cfg = resolve_config(config_path, {"corpus": corpus, "format": format_, "out_dir": out_dir,
                                       "model": model_path, "stoplist": stoplist, "lemmas": lemmas})
    records = _load_records(cfg)
    model = reactions.load_model(_require(cfg, "model", "--model"))
    out = _prepare_out_dir(cfg, "predict")
    prep = _prep(cfg)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "date", "predictedLabel"] + [f"prob_{c}" for c in model.classes])
    for record in records:
        label, probs = reactions.predict(model, prep(record.text))
        writer.writerow([record.id, record.date.isoformat(), label] + [repr(float(p)) for p in probs])
    path = _write(out, "predictions.csv", buf.getvalue())
    click.echo(f"wrote {path}")


@cli.command()
@_config_option
@_corpus_option
@_format_option
@_out_option
@click.option("--model", "model_path", type=str, default=None, help="Trained model JSON file.")
@click.option("--stoplist", type=str, default=None, help="Stoplist file (default packaged).")
@click.option("--lemmas", type=str, default=None, help="Lemma dictionary file (default packaged).")
def evaluate(config_path, corpus, format_, out_dir, model_path, stoplist, lemmas) -> None:
    """Score predictions against the labeled subset of the corpus."""
    cfg = resolve_config(config_path, {"corpus": corpus, "format": format_, "out_dir": out_dir,
                                       "model": model_path, "stoplist": stoplist, "lemmas": lemmas})
    records = _load_records(cfg)
    labeled = [r for r in records if r.label is not None]
    if not labeled:
        raise ValidationError("no labeled rows to evaluate against")
    model = reactions.load_model(_require(cfg, "model", "--model"))
    out = _prepare_out_dir(cfg, "evaluate")
    prep = _prep(cfg)
    predictions = [reactions.predict(model, prep(r.text))[0] for r in labeled]
    truth = [r.label for r in labeled]
    report = metrics.metrics_report(predictions, truth, list(model.classes))
    _write(out, "metrics.json", report.to_json() + "\n")
    text = report.to_text()
    _write(out, "metrics.txt", text)
    click.echo(text, nl=False)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.Abort:
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except ComputationError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
