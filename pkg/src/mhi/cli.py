"""Command-line interface: ``mhi extract|train|eval|predict|render|synth``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure
(diverged training). Every command is deterministic given its inputs, flags
and seeds: repeated runs produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import serialize
from .classify import (
    KnnModel,
    MlpConfig,
    SplitSpec,
    Standardizer,
    TrainedModel,
    evaluate,
    split_dataset,
    train_mlp,
)
from .diagnostics import detect_secondary_blob
from .errors import (
    MhiError,
    MissingFrameError,
    NoMotionError,
    NonFiniteLossError,
    SingleClassError,
)
from .imgio import (
    FrameSequence,
    SequenceRecord,
    load_manifest_file,
    load_sequence,
    write_pgm_file,
)
from .moments import FEATURE_DIM, LabeledSample, feature_vector
from .synth import generate, parse_specs
from .temporal import build_template, normalize_mhi

log = logging.getLogger("mhi")

FEATURE_HEADER = "label,src," + ",".join(f"f{i}" for i in range(FEATURE_DIM))


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the contract reserves 2 for data
    # errors, so remap to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _window_size(value: str) -> int:
    size = int(value)
    if size < 2:
        raise argparse.ArgumentTypeError("window must be >= 2")
    return size


def _positive(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError("value must be >= 1")
    return number


def _pmap(fn, items, jobs: int) -> list:
    """Order-preserving map, optionally across a thread pool."""
    if jobs <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _write_out(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# --- feature CSV ---

def features_to_csv(samples: list[LabeledSample]) -> str:
    lines = [FEATURE_HEADER]
    for sample in samples:
        values = ",".join(serialize.format_float(v) for v in sample.features)
        lines.append(f"{sample.label},{sample.source},{values}")
    return "\n".join(lines) + "\n"


def read_features_csv(path: str) -> list[LabeledSample]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != FEATURE_HEADER.split(","):
        raise MhiError(f"{path}: not a feature CSV (bad header)")
    samples = []
    for row in rows[1:]:
        if len(row) != 2 + FEATURE_DIM:
            raise MhiError(f"{path}: row has {len(row)} fields, expected {2 + FEATURE_DIM}")
        features = np.array([float(v) for v in row[2:]], dtype=np.float64)
        samples.append(LabeledSample(features=features, label=row[0], source=row[1]))
    return samples


def extract_samples(
    manifest: str, theta: float, tau: int, jobs: int = 1
) -> list[LabeledSample]:
    """Features for every manifest sequence; motion-free ones are skipped with
    a warning. Pipeline errors are re-raised with the sequence directory."""
    records = load_manifest_file(manifest)
    root = os.path.dirname(os.path.abspath(manifest))

    def worker(record: SequenceRecord) -> LabeledSample | None:
        try:
            seq = load_sequence(record, root=root)
            template = build_template(seq, theta=theta, tau=tau)
            features = feature_vector(template)
        except NoMotionError:
            log.warning("sequence %s: no motion, skipped", record.dir)
            return None
        except MhiError as exc:
            raise MhiError(f"sequence {record.dir}: {exc}") from exc
        first, last = template.frame_span
        return LabeledSample(
            features=features,
            label=record.label or "",
            source=f"{record.dir}:{first}-{last}",
        )

    return [s for s in _pmap(worker, records, jobs) if s is not None]


def cmd_extract(args) -> int:
    samples = extract_samples(args.manifest, args.theta, args.tau, args.jobs)
    _write_out(args.out, features_to_csv(samples))
    return 0


# --- training / evaluation ---

def _confusion_section(name: str, model: TrainedModel, samples) -> str:
    matrix, accuracy = evaluate(model, samples)
    return f"[{name}] accuracy {serialize.format_float(accuracy)}\n{matrix.to_csv()}"


def cmd_train(args) -> int:
    if args.features:
        samples = read_features_csv(args.features)
    else:
        samples = extract_samples(args.manifest, args.theta, args.tau, args.jobs)
    labeled = [s for s in samples if s.label]
    if len(labeled) < len(samples):
        log.warning("ignoring %d unlabeled sample(s)", len(samples) - len(labeled))
    if len({s.label for s in labeled}) < 2:
        raise SingleClassError("training needs samples from >= 2 classes")

    train, val, test = split_dataset(labeled, SplitSpec(seed=args.seed))
    standardizer = Standardizer.fit(train)

    def standardized(part):
        return [
            LabeledSample(standardizer.apply(s.features), s.label, s.source)
            for s in part
        ]

    if args.classifier == "knn":
        std_train = standardized(train)
        knn = KnnModel(
            k=args.k,
            vectors=np.stack([s.features for s in std_train]),
            labels=[s.label for s in std_train],
        )
        model = TrainedModel(
            classifier="knn", tau=args.tau, theta=args.theta,
            standardizer=standardizer, knn=knn,
        )
    else:
        cfg = MlpConfig(
            hidden=args.hidden, lr=args.lr, epochs=args.epochs,
            batch=args.batch, seed=args.seed,
        )
        mlp = train_mlp(standardized(train), standardized(val), cfg)
        model = TrainedModel(
            classifier="mlp", tau=args.tau, theta=args.theta,
            standardizer=standardizer, mlp=mlp,
        )

    with open(args.out, "wb") as fh:
        fh.write(model.to_bytes())

    report = "".join(
        (
            f"classifier: {args.classifier}\n",
            f"labels: {','.join(model.label_set)}\n",
            f"samples: train={len(train)} val={len(val)} test={len(test)}\n\n",
            _confusion_section("train", model, train), "\n",
            _confusion_section("val", model, val), "\n",
            _confusion_section("test", model, test),
        )
    )
    report_path = args.report or os.path.splitext(args.out)[0] + ".report.txt"
    _write_out(report_path, report)
    log.info("model written to %s, report to %s", args.out, report_path)
    return 0


def cmd_eval(args) -> int:
    model = TrainedModel.load(args.model)
    samples = read_features_csv(args.features)
    matrix, _ = evaluate(model, samples)
    _write_out(args.out, matrix.to_csv())
    return 0


# --- prediction / rendering ---

_FRAME_RE = re.compile(r"(\d{6})\.pgm$")


def _scan_frame_dir(directory: str) -> SequenceRecord:
    indices = sorted(
        int(m.group(1))
        for name in os.listdir(directory)
        if (m := _FRAME_RE.fullmatch(name))
    )
    if not indices:
        raise MhiError(f"no NNNNNN.pgm frames in {directory}")
    missing = sorted(set(range(indices[0], indices[-1] + 1)) - set(indices))
    if missing:
        raise MissingFrameError(missing[0], os.path.join(directory, f"{missing[0]:06d}.pgm"))
    return SequenceRecord(dir=directory, start=indices[0], end=indices[-1])


def predict_windows(
    model: TrainedModel,
    seq: FrameSequence,
    window: int | None = None,
    stride: int | None = None,
    jobs: int = 1,
) -> list[dict]:
    """Sliding-window labeling of a frame sequence.

    Windows start every ``stride`` frames; the trailing full window is always
    included so the end of the sequence is covered. Windows without motion get
    label "none" with score 0. Each entry carries the secondary-blob
    diagnostic of its motion-energy image.
    """
    n = len(seq)
    if n < 2:
        raise MhiError(f"need >= 2 frames to predict, got {n}")
    size = min(window if window is not None else model.tau, n)
    size = max(size, 2)
    step = stride if stride is not None else max(1, size // 2)

    starts = list(range(0, n - size + 1, step))
    if starts[-1] != n - size:
        starts.append(n - size)

    base = seq.record.start

    def worker(offset: int) -> dict:
        frames = seq.frames[offset : offset + size]
        sub = FrameSequence(
            frames=frames,
            record=SequenceRecord(
                dir=seq.record.dir, start=base + offset, end=base + offset + size - 1
            ),
        )
        template = build_template(sub, theta=model.theta, tau=model.tau)
        try:
            label, score = model.predict(feature_vector(template))
        except NoMotionError:
            label, score = "none", 0.0
        blob = detect_secondary_blob(template.mei)
        return {
            "start_frame": base + offset,
            "end_frame": base + offset + size - 1,
            "label": label,
            "score": float(score),
            "diagnostic": {
                "component_count": blob.component_count,
                "warning": blob.warning,
            },
        }

    return _pmap(worker, starts, jobs)


def cmd_predict(args) -> int:
    model = TrainedModel.load(args.model)
    record = _scan_frame_dir(args.frames)
    seq = load_sequence(record)
    entries = predict_windows(model, seq, args.window, args.stride, args.jobs)
    _write_out(args.out, serialize.dumps(entries) + "\n")
    return 0


def cmd_render(args) -> int:
    record = _scan_frame_dir(args.frames)
    seq = load_sequence(record)
    template = build_template(seq, theta=args.theta, tau=args.tau)
    os.makedirs(args.out, exist_ok=True)
    write_pgm_file(os.path.join(args.out, "mei.pgm"), template.mei * np.uint8(255))
    write_pgm_file(os.path.join(args.out, "mhi.pgm"), normalize_mhi(template.mhi))
    return 0


def cmd_synth(args) -> int:
    with open(args.spec, "r", encoding="utf-8") as fh:
        specs = parse_specs(fh.read())
    records = generate(specs, args.out)
    log.info("wrote %d sequence(s) under %s", len(records), args.out)
    return 0


# --- parser wiring ---

def _add_pipeline_flags(parser):
    parser.add_argument("--theta", type=float, default=25.0,
                        help="frame-difference threshold")
    parser.add_argument("--tau", type=_positive, default=300,
                        help="history window length in frames")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="mhi",
        description="Motion-history temporal templates and action classification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("extract", formatter_class=fmt,
                       help="manifest of sequences -> feature CSV")
    p.add_argument("--manifest", required=True, help="JSON-lines sequence manifest")
    _add_pipeline_flags(p)
    p.add_argument("--jobs", type=_positive, default=1, help="parallel workers")
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", formatter_class=fmt,
                       help="split, standardize, train, report")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--features", help="feature CSV from 'mhi extract'")
    source.add_argument("--manifest", help="sequence manifest (features extracted on the fly)")
    p.add_argument("--classifier", choices=("knn", "mlp"), required=True)
    _add_pipeline_flags(p)
    p.add_argument("--k", type=_positive, default=5, help="KNN neighbor count")
    p.add_argument("--lr", type=float, default=0.05, help="MLP learning rate")
    p.add_argument("--epochs", type=_positive, default=300, help="MLP training epochs")
    p.add_argument("--batch", type=_positive, default=2, help="MLP mini-batch size")
    p.add_argument("--hidden", type=_hidden_sizes, default=(64, 32),
                   help="MLP hidden layer sizes, comma-separated")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the split shuffle and MLP training")
    p.add_argument("--jobs", type=_positive, default=1, help="parallel workers")
    p.add_argument("--out", required=True, help="model JSON output path")
    p.add_argument("--report", default=None,
                   help="report path (default: model path with .report.txt)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", formatter_class=fmt,
                       help="evaluate a model on a feature CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", default=None, help="confusion CSV path (default stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", formatter_class=fmt,
                       help="sliding-window labels for a frame directory")
    p.add_argument("--model", required=True)
    p.add_argument("--frames", required=True, help="directory of NNNNNN.pgm frames")
    p.add_argument("--window", type=_window_size, default=None,
                   help="window length in frames (default: model tau)")
    p.add_argument("--stride", type=_positive, default=None,
                   help="window step (default: window/2, min 1)")
    p.add_argument("--jobs", type=_positive, default=1, help="parallel workers")
    p.add_argument("--out", default=None, help="JSON output path (default stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("render", formatter_class=fmt,
                       help="write mei.pgm / mhi.pgm for a frame directory")
    p.add_argument("--frames", required=True, help="directory of NNNNNN.pgm frames")
    _add_pipeline_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("synth", formatter_class=fmt,
                       help="generate synthetic clips and a manifest")
    p.add_argument("--spec", required=True, help="JSON array of clip specs")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    return parser


def _hidden_sizes(value: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(part) for part in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad hidden sizes: {value!r}")
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError(f"bad hidden sizes: {value!r}")
    return sizes


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NonFiniteLossError as exc:
        log.error("%s", exc)
        return 3
    except (MhiError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
