"""Command-line pipeline: validate, extract-stats, encode, train, classify,
detect, gen, eval, render.

Exit codes: 0 success, 2 invalid input (schema, geometry, labels, missing
input files), 3 model-file problems (missing, corrupt, wrong version),
4 internal error. Every subcommand is a pure function of its input files:
identical inputs produce identical output bytes.

The rulepack defaults to the stock "acl-printed" pack; override with
--rulepack (a JSON file path, or the builtin names "acl-printed" /
"acl-corrected") or the CTBR_RULEPACK environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .encoder import FEATURE_ORDER, FeatureVector, encode_document
from .errors import CorruptModelError, CtbrError, SchemaError, VersionError
from .ingest import (
    LabelFile,
    canonical_json_bytes,
    load_document,
    load_labels,
    merge_labels,
    save_document,
    save_labels,
)
from .metrics import evaluate_classification, evaluate_detection
from .model import BBox, BlockLabel
from .render import render_overlay
from .rules import acl_corrected_pack, acl_printed_pack, detect_single_modal_blocks, load_rulepack
from .segmenter import DetectedObject, ObjectKind, detect_objects, set_boundaries
from .svm import (
    DEFAULT_C,
    DEFAULT_EPOCHS,
    DEFAULT_SEED,
    TrainingSet,
    load_model,
    predict_many,
    save_model,
    train,
    training_accuracy,
)
from .synthetic import NoiseSpec, SyntheticSpec, TruthObject, generate_corpus

RULEPACK_ENV = "CTBR_RULEPACK"

_BUILTIN_PACKS = {
    "acl-printed": acl_printed_pack,
    "acl-corrected": acl_corrected_pack,
}


class _Exit(Exception):
    """Carries an explicit exit code with its message."""

    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _read_input(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise _Exit(2, f"cannot read input file {path}: {exc}") from exc


def _read_model(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise _Exit(3, f"cannot read model file {path}: {exc}") from exc


def _load_json(path: str) -> dict:
    data = _read_input(path)
    try:
        return json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError("$", f"{path} is not valid UTF-8 JSON: {exc}") from exc


def _resolve_pack(name_or_path: str | None):
    if name_or_path is None:
        name_or_path = os.environ.get(RULEPACK_ENV) or "acl-printed"
    if name_or_path in _BUILTIN_PACKS:
        return _BUILTIN_PACKS[name_or_path]()
    return load_rulepack(_read_input(name_or_path))


def _load_features_file(path: str) -> dict[str, FeatureVector]:
    raw = _load_json(path)
    if not isinstance(raw, dict):
        raise SchemaError("$", "features file must map block ids to 9-value arrays")
    features = {}
    for bid, values in raw.items():
        if not (isinstance(values, list) and len(values) == len(FEATURE_ORDER)):
            raise SchemaError(f"$.{bid}", f"expected array of {len(FEATURE_ORDER)} numbers")
        features[bid] = FeatureVector.from_array(values)
    return features


def _parse_objects_file(path: str) -> tuple[str, list[TruthObject]]:
    """Read truth-objects or detections JSON into comparable objects."""
    raw = _load_json(path)
    if not isinstance(raw, dict) or "objects" not in raw:
        raise SchemaError("$", f"{path}: expected an object with an 'objects' array")
    doc_id = raw.get("doc_id", "")
    objects = []
    for i, entry in enumerate(raw["objects"]):
        epath = f"objects[{i}]"
        try:
            kind = ObjectKind(entry["kind"])
            region = BBox(*[float(v) for v in entry["region"]])
            page = int(entry["page"])
            title = str(entry["title_block_id"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(epath, f"bad object entry: {exc}") from exc
        objects.append(
            TruthObject(kind=kind, region=region, title_block_id=title, page_index=page)
        )
    return doc_id, objects


def _detections_payload(doc_id: str, result) -> dict:
    return {
        "doc_id": doc_id,
        "objects": [
            {
                "kind": obj.kind.value,
                "page": obj.page_index,
                "region": [round(v, 4) for v in obj.region.as_list()],
                "title_block_id": obj.title_block_id,
                "confidence": round(obj.confidence, 6),
            }
            for obj in result.objects
        ],
        "unresolved": list(result.unresolved),
    }


def _write(path: str, data: bytes):
    out = Path(path)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(data)


def _stats_payload(doc_id: str, result) -> dict:
    stats = result.stats
    return {
        "doc_id": doc_id,
        "feature_order": list(FEATURE_ORDER),
        "stats": {
            "body_font_name": stats.body_font_name,
            "body_font_size": stats.body_font_size,
            "boundary_left": stats.boundary_left,
            "boundary_right": stats.boundary_right,
            "boundary_top": stats.boundary_top,
            "boundary_bottom": stats.boundary_bottom,
            "max_width": stats.max_width,
            "max_height": stats.max_height,
        },
        "skipped": list(result.skipped),
    }


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_validate(args) -> dict:
    doc = load_document(_read_input(args.doc))
    blocks = sum(len(p.blocks) for p in doc.pages)
    return {"ok": True, "doc_id": doc.doc_id, "pages": len(doc.pages), "blocks": blocks}


def _cmd_extract_stats(args) -> dict:
    doc = load_document(_read_input(args.doc))
    payload = _stats_payload(doc.doc_id, encode_document(doc))
    if args.out:
        _write(args.out, canonical_json_bytes(payload))
    return payload


def _cmd_encode(args) -> dict:
    doc = load_document(_read_input(args.doc))
    result = encode_document(doc)
    features = {
        bid: [float(v) for v in fv.as_array()] for bid, fv in result.features.items()
    }
    _write(args.out, canonical_json_bytes(features))
    stats_out = args.stats_out or _sidecar_path(args.out)
    _write(stats_out, canonical_json_bytes(_stats_payload(doc.doc_id, result)))
    return {
        "doc_id": doc.doc_id,
        "encoded": len(features),
        "skipped": list(result.skipped),
        "features": args.out,
        "stats": stats_out,
    }


def _sidecar_path(features_path: str) -> str:
    p = Path(features_path)
    return str(p.with_name(p.stem + ".stats" + (p.suffix or ".json")))


def _corpus_rows(args) -> list[tuple[FeatureVector, BlockLabel]]:
    corpus = Path(args.corpus)
    labels_dir = Path(args.labels_dir) if args.labels_dir else corpus
    doc_paths = sorted(
        p
        for p in corpus.glob("*.json")
        if not p.name.endswith((".labels.json", ".objects.json", ".stats.json"))
    )
    if not doc_paths:
        raise _Exit(2, f"no documents found in {corpus}")
    label_files: dict[str, LabelFile] = {}
    for p in sorted(labels_dir.glob("*.labels.json")):
        lf = load_labels(p.read_bytes())
        label_files[lf.doc_id] = lf

    def one(path: Path):
        doc = load_document(path.read_bytes())
        lf = label_files.get(doc.doc_id)
        if lf is None:
            raise _Exit(2, f"no label file for document {doc.doc_id!r}")
        labeled = merge_labels(doc, lf)
        result = encode_document(doc)
        return doc.doc_id, [
            (result.features[bid], label)
            for bid, label in sorted(labeled.labels.items())
            if bid in result.features
        ]

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            per_doc = list(pool.map(one, doc_paths))
    else:
        per_doc = [one(p) for p in doc_paths]
    per_doc.sort(key=lambda item: item[0])  # merge deterministically by doc_id
    return [row for _, rows in per_doc for row in rows]


def _cmd_train(args) -> dict:
    if args.features:
        if not args.labels:
            raise _Exit(2, "--features requires --labels")
        features = _load_features_file(args.features)
        label_file = load_labels(_read_input(args.labels))
        rows = [
            (features[bid], label)
            for bid, label in sorted(dict(label_file.entries).items())
            if bid in features
        ]
    elif args.corpus:
        rows = _corpus_rows(args)
    else:
        raise _Exit(2, "provide --features/--labels or --corpus")
    if not rows:
        raise _Exit(2, "no labeled feature rows to train on")

    data = TrainingSet.from_rows(rows)
    model = train(data, C=args.C, epochs=args.epochs, seed=args.seed)
    _write(args.out, save_model(model))
    counts = {label.value: 0 for label in BlockLabel}
    for _, label in rows:
        counts[label.value] += 1
    report = {
        "rows": len(rows),
        "per_class_counts": counts,
        "training_accuracy": training_accuracy(model, data),
        "hyperparams": model.hyperparams,
        "model": args.out,
    }
    if args.report:
        _write(args.report, canonical_json_bytes(report))
    return report


def _cmd_classify(args) -> dict:
    model = load_model(_read_model(args.model))
    features = _load_features_file(args.features)
    doc_id = args.doc_id
    if doc_id is None:
        sidecar = Path(_sidecar_path(args.features))
        if not sidecar.exists():
            raise _Exit(2, f"--doc-id not given and sidecar {sidecar} not found")
        doc_id = json.loads(sidecar.read_text("utf-8"))["doc_id"]
    predicted = predict_many(model, features)
    label_file = LabelFile(
        doc_id=doc_id,
        entries=tuple(sorted((bid, label) for bid, label in predicted.items())),
    )
    _write(args.out, save_labels(label_file))
    return {"doc_id": doc_id, "classified": len(predicted), "out": args.out}


def _cmd_detect(args) -> dict:
    doc = load_document(_read_input(args.doc))
    pack = _resolve_pack(args.rulepack)
    result_enc = encode_document(doc)
    titles = detect_single_modal_blocks(doc, pack, result_enc.stats)

    if args.labels:
        labeled = merge_labels(doc, load_labels(_read_input(args.labels)))
        labels = labeled.labels
    else:
        if not args.model:
            raise _Exit(2, "provide --model or --labels")
        model = load_model(_read_model(args.model))
        labels = predict_many(model, result_enc.features)

    result = detect_objects(doc, titles, labels)
    payload = _detections_payload(doc.doc_id, result)
    _write(args.out, canonical_json_bytes(payload))

    rendered = []
    if args.render:
        out_dir = Path(args.out_dir or Path(args.out).parent)
        for page in doc.pages:
            svg = render_overlay(
                doc, labels, list(result.objects), page.index, list(result.boundaries)
            )
            path = out_dir / f"{doc.doc_id}.page{page.index}.svg"
            _write(str(path), svg)
            rendered.append(str(path))
    payload = dict(payload)
    payload.update({"out": args.out, "rendered": rendered})
    return payload


def _cmd_gen(args) -> dict:
    raw = _load_json(args.spec)
    try:
        noise = raw.get("noise", {})
        spec = SyntheticSpec(
            seed=int(raw["seed"]),
            pages=int(raw.get("pages", 3)),
            columns=int(raw.get("columns", 2)),
            figures_per_page=tuple(raw.get("figures_per_page", [1, 3])),
            tables_per_page=tuple(raw.get("tables_per_page", [0, 2])),
            noise=NoiseSpec(
                footnote_prob=float(noise.get("footnote_prob", 0.3)),
                page_number=bool(noise.get("page_number", True)),
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError("$", f"bad synthetic spec: {exc}") from exc

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for doc, truth in generate_corpus(spec, args.docs):
        _write(str(out_dir / f"{doc.doc_id}.json"), save_document(doc))
        label_file = LabelFile(
            doc_id=doc.doc_id, entries=tuple(sorted(truth.labels.items()))
        )
        _write(str(out_dir / f"{doc.doc_id}.labels.json"), save_labels(label_file))
        objects_payload = {
            "doc_id": doc.doc_id,
            "objects": [
                {
                    "kind": obj.kind.value,
                    "page": obj.page_index,
                    "region": [round(v, 4) for v in obj.region.as_list()],
                    "title_block_id": obj.title_block_id,
                }
                for obj in truth.objects
            ],
        }
        _write(str(out_dir / f"{doc.doc_id}.objects.json"), canonical_json_bytes(objects_payload))
        written.append(doc.doc_id)
    return {"docs": written, "out_dir": str(out_dir)}


def _collect_eval_paths(pred: str, truth: str) -> list[tuple[str, str]]:
    pred_path, truth_path = Path(pred), Path(truth)
    if pred_path.is_dir() != truth_path.is_dir():
        raise _Exit(2, "--pred and --truth must both be files or both directories")
    if not pred_path.is_dir():
        return [(pred, truth)]

    def by_doc(directory: Path) -> dict[str, Path]:
        out = {}
        for p in sorted(directory.glob("*.json")):
            try:
                doc_id = json.loads(p.read_text("utf-8")).get("doc_id")
            except (OSError, json.JSONDecodeError):
                continue
            if doc_id:
                out[doc_id] = p
        return out

    pred_by = by_doc(pred_path)
    truth_by = by_doc(truth_path)
    shared = sorted(set(pred_by) & set(truth_by))
    if not shared:
        raise _Exit(2, "no shared doc_ids between --pred and --truth directories")
    return [(str(pred_by[d]), str(truth_by[d])) for d in shared]


def _cmd_eval(args) -> dict:
    pairs = _collect_eval_paths(args.pred, args.truth)
    if args.kind == "classification":
        predicted: dict[str, BlockLabel] = {}
        truth: dict[str, BlockLabel] = {}
        for pred_path, truth_path in pairs:
            pfile = load_labels(_read_input(pred_path))
            tfile = load_labels(_read_input(truth_path))
            for bid, label in pfile.entries:
                predicted[f"{pfile.doc_id}/{bid}"] = label
            for bid, label in tfile.entries:
                truth[f"{tfile.doc_id}/{bid}"] = label
        report = evaluate_classification(predicted, truth).to_dict()
    else:
        pred_objs: list[DetectedObject] = []
        truth_objs: list[TruthObject] = []
        for di, (pred_path, truth_path) in enumerate(pairs):
            # page offset keeps documents from matching across each other
            offset = di * 100000
            _, pobjs = _parse_objects_file(pred_path)
            _, tobjs = _parse_objects_file(truth_path)
            for o in pobjs:
                pred_objs.append(
                    DetectedObject(
                        kind=o.kind,
                        title_block_id=o.title_block_id,
                        region=o.region,
                        page_index=o.page_index + offset,
                        compartment_id="",
                        confidence=1.0,
                    )
                )
            for o in tobjs:
                truth_objs.append(
                    TruthObject(
                        kind=o.kind,
                        region=o.region,
                        title_block_id=o.title_block_id,
                        page_index=o.page_index + offset,
                    )
                )
        report = evaluate_detection(pred_objs, truth_objs, args.iou).to_dict()
    if args.report:
        _write(args.report, canonical_json_bytes(report))
    return report


def _cmd_render(args) -> dict:
    doc = load_document(_read_input(args.doc))
    labels = {}
    if args.labels:
        labeled = merge_labels(doc, load_labels(_read_input(args.labels)))
        labels = labeled.labels
    objects = []
    if args.objects:
        _, truth_objs = _parse_objects_file(args.objects)
        objects = [
            DetectedObject(
                kind=o.kind,
                title_block_id=o.title_block_id,
                region=o.region,
                page_index=o.page_index,
                compartment_id="",
                confidence=1.0,
            )
            for o in truth_objs
        ]
    pack = _resolve_pack(args.rulepack)
    stats = encode_document(doc).stats
    titles = detect_single_modal_blocks(doc, pack, stats)
    boundaries = set_boundaries(doc, titles)
    svg = render_overlay(doc, labels, objects, args.page, boundaries)
    _write(args.out, svg)
    return {"doc_id": doc.doc_id, "page": args.page, "out": args.out}


# ---------------------------------------------------------------------------
# Parser / entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctbr",
        description="Text-block classification and figure/table detection pipeline",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=argparse.ArgumentParser)

    def add_parser(name: str, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    p = add_parser("validate", help="validate a blocks-JSON document")
    p.add_argument("doc")
    p.set_defaults(func=_cmd_validate)

    p = add_parser("extract-stats", help="document statistics (fonts, boundaries)")
    p.add_argument("--doc", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_extract_stats)

    p = add_parser("encode", help="encode blocks into 9-element feature vectors")
    p.add_argument("--doc", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--stats-out")
    p.set_defaults(func=_cmd_encode)

    p = add_parser("train", help="train the one-vs-rest linear SVM")
    p.add_argument("--features")
    p.add_argument("--labels")
    p.add_argument("--corpus")
    p.add_argument("--labels-dir")
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.add_argument("--C", type=float, default=DEFAULT_C)
    p.add_argument("--epochs", type=int, default=DEFAULT_EPOCHS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_train)

    p = add_parser("classify", help="predict block labels from features")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--doc-id")
    p.set_defaults(func=_cmd_classify)

    p = add_parser("detect", help="detect figure/table regions in a document")
    p.add_argument("--doc", required=True)
    p.add_argument("--model")
    p.add_argument("--labels", help="ground-truth labels instead of a model")
    p.add_argument("--rulepack")
    p.add_argument("--out", required=True)
    p.add_argument("--render", action="store_true")
    p.add_argument("--out-dir")
    p.set_defaults(func=_cmd_detect)

    p = add_parser("gen", help="generate a synthetic corpus with ground truth")
    p.add_argument("--spec", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--docs", type=int, default=1)
    p.set_defaults(func=_cmd_gen)

    p = add_parser("eval", help="evaluate predictions against ground truth")
    p.add_argument("--kind", choices=("classification", "detection"), default="detection")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--iou", type=float, default=0.8)
    p.add_argument("--report")
    p.set_defaults(func=_cmd_eval)

    p = add_parser("render", help="render one page as an SVG overlay")
    p.add_argument("--doc", required=True)
    p.add_argument("--labels")
    p.add_argument("--objects")
    p.add_argument("--rulepack")
    p.add_argument("--page", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_render)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        payload = args.func(args)
    except _Exit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (VersionError, CorruptModelError) as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return 3
    except (CtbrError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - internal failure guard
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        _print_human(args.command, payload)
    return 0


def _print_human(command: str, payload: dict):
    if command == "validate":
        print(f"ok: {payload['doc_id']} ({payload['pages']} pages, {payload['blocks']} blocks)")
    elif command == "train":
        print(
            f"trained on {payload['rows']} rows, "
            f"training accuracy {payload['training_accuracy']:.4f} -> {payload['model']}"
        )
    elif command == "detect":
        print(
            f"{payload['doc_id']}: {len(payload['objects'])} objects, "
            f"{len(payload['unresolved'])} unresolved -> {payload['out']}"
        )
    elif command == "eval":
        if "macro_f1" in payload:
            print(f"macro-F1 {payload['macro_f1']:.4f}, accuracy {payload['accuracy']:.4f}")
        else:
            print(
                f"precision {payload['precision']:.4f}, recall {payload['recall']:.4f}, "
                f"mean IoU {payload['mean_iou']:.4f}"
            )
    elif command == "gen":
        print(f"generated {len(payload['docs'])} documents in {payload['out_dir']}")
    else:
        print(json.dumps(payload, sort_keys=True))


# Spec-level convenience entry points -------------------------------------


def run_detect(
    doc_path: str,
    model_path: str,
    rulepack_path: str | None = None,
    out_path: str = "detections.json",
    render: bool = False,
    out_dir: str | None = None,
) -> int:
    argv = ["detect", "--doc", doc_path, "--model", model_path, "--out", out_path]
    if rulepack_path:
        argv += ["--rulepack", rulepack_path]
    if render:
        argv.append("--render")
        if out_dir:
            argv += ["--out-dir", out_dir]
    return main(argv)


def run_pipeline_train(
    corpus_dir: str,
    labels_dir: str | None,
    out_model: str,
    report_path: str | None = None,
    jobs: int = 1,
) -> int:
    argv = ["train", "--corpus", corpus_dir, "--out", out_model, "--jobs", str(jobs)]
    if labels_dir:
        argv += ["--labels-dir", labels_dir]
    if report_path:
        argv += ["--report", report_path]
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
