"""Command-line interface.

One subcommand per pipeline stage plus `run-all` for the whole thing and
`serve` for the annotation service. Stage commands exchange artifacts as
files (frame-vector containers, NDJSON, JSON) so any stage can be rerun
in isolation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .audio import (compute_energy, compute_logmel, load_audio, load_embeddings,
                    save_embeddings, stack_features)
from .bundle import load_bundle
from .combine import (CombinerConfig, combine, load_transcripts, mask_noise,
                      phoneme_length_stats, save_transcripts, to_runs)
from .mine import (Corpus, build_vocabulary, coverage, find_knee, load_vocabulary,
                   save_vocabulary, score_ngrams, threshold_sweep)
from .pipeline import PipelineConfig, run_pipeline
from .quantize import Codebook, LabelSequence, assign_labels, inertia_scan, train_codebook
from .segment import (FramewiseScore, dynamic_threshold, energy_to_framewise,
                      extract_clips, filter_by_tags, merge_and_pad)


def _parse_grid(spec: str) -> list[float]:
    """Parse '0.1:0.5:0.1' (inclusive range) or '0.1,0.2,0.3'."""
    if ":" in spec:
        start, stop, step = (float(x) for x in spec.split(":"))
        values = np.arange(start, stop + step / 2, step)
        return [round(float(v), 10) for v in values]
    return [float(x) for x in spec.split(",")]


def _parse_int_list(spec: str) -> list[int]:
    if ":" in spec:
        return [int(v) for v in _parse_grid(spec)]
    return [int(x) for x in spec.split(",")]


def _feature_files(path: Path) -> list[Path]:
    if path.is_dir():
        files = sorted(path.glob("*.dgfv"))
        if not files:
            raise SystemExit(f"no .dgfv files under {path}")
        return files
    return [path]


def cmd_features(args) -> int:
    clip = load_audio(args.input, working_rate=args.rate)
    feats = compute_logmel(clip, n_mels=args.mels, frame_duration=args.frame,
                           hop=args.hop)
    save_embeddings(args.out, feats)
    print(f"{args.out}: {feats.n_frames} frames x {feats.dim} mels")
    return 0


def cmd_segment(args) -> int:
    if args.scores:
        feats = load_embeddings(args.scores)
        scores = FramewiseScore(feats.matrix[:, 0], feats.hop,
                                source_id=Path(args.scores).stem)
        # without the audio the score grid is the best duration estimate
        duration = load_audio(args.input).duration if args.input \
            else feats.n_frames * feats.hop
    elif args.input:
        clip = load_audio(args.input)
        scores = energy_to_framewise(compute_energy(clip, args.frame, args.hop),
                                     clip.source_id)
        duration = clip.duration
    else:
        raise SystemExit("segment needs --scores or --input")
    threshold = dynamic_threshold(scores)
    spans = merge_and_pad(extract_clips(scores, threshold), duration,
                          args.gap_max, args.pad)
    keep, reason = True, "ok"
    if args.tags:
        with open(args.tags, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                if rec.get("clip_id") in ("", None, scores.source_id):
                    keep, reason = filter_by_tags(None, rec["tags"],
                                                  tag_threshold=args.tag_threshold)
                    break
    payload = {
        "clip_id": scores.source_id,
        "threshold": threshold,
        "kept": keep,
        "reason": reason,
        "spans": [{"start": s.start, "end": s.end} for s in spans],
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
    print(f"{scores.source_id}: threshold {threshold:.3f}, "
          f"{len(spans)} span(s), kept={keep} ({reason})")
    return 0


def cmd_quantize_train(args) -> int:
    parts = [load_embeddings(p) for p in _feature_files(Path(args.features))]
    matrix = stack_features(parts)
    codebook = train_codebook(matrix, args.k, seed=args.seed,
                              restarts=args.restarts)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(codebook.to_dict(), fh, indent=2)
    print(f"k={codebook.k} on {matrix.shape[0]} frames, "
          f"inertia {codebook.inertia:.6g} -> {args.out}")
    return 0


def cmd_quantize(args) -> int:
    with open(args.codebook, encoding="utf-8") as fh:
        codebook = Codebook.from_dict(json.load(fh))
    records = []
    for path in _feature_files(Path(args.features)):
        feats = load_embeddings(path)
        seq = assign_labels(feats, codebook, sentence_id=path.stem)
        records.append({
            "sentence_id": seq.sentence_id,
            "dog_id": seq.dog_id or path.stem.split("__", 1)[0],
            "frame_duration": seq.frame_duration,
            "labels": seq.labels.tolist(),
        })
    with open(args.out, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    print(f"labeled {len(records)} sequence(s) -> {args.out}")
    return 0


def cmd_inertia_scan(args) -> int:
    parts = [load_embeddings(p) for p in _feature_files(Path(args.features))]
    matrix = stack_features(parts)
    scan = inertia_scan(matrix, _parse_int_list(args.ks), seed=args.seed,
                        restarts=args.restarts)
    for k, inertia in scan:
        print(f"k={k:4d}  inertia={inertia:.6g}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"scan": [[k, v] for k, v in scan]}, fh, indent=2)
    return 0


def _load_label_records(path) -> list[LabelSequence]:
    sequences = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            sequences.append(LabelSequence(
                np.asarray(rec["labels"], dtype=np.int64),
                rec["frame_duration"], rec.get("sentence_id", ""),
                rec.get("dog_id", "")))
    return sequences


def cmd_combine(args) -> int:
    config = CombinerConfig(args.tolerance)
    noise = frozenset()
    if args.noise:
        with open(args.noise, encoding="utf-8") as fh:
            noise = frozenset(json.load(fh)["noise_labels"])
    transcripts = []
    for seq in _load_label_records(args.labels):
        transcripts.append(mask_noise(to_runs(combine(seq, config)), noise))
    save_transcripts(args.out, transcripts)
    print(f"combined {len(transcripts)} transcript(s) -> {args.out}")
    return 0


def cmd_stats(args) -> int:
    transcripts = load_transcripts(args.transcripts)
    stats = phoneme_length_stats(transcripts)
    print(f"{'label':>5}  {'mean_s':>8}  {'var_s2':>10}  {'runs':>6}")
    for s in stats:
        print(f"{s.label:>5}  {s.mean_length:>8.4f}  {s.var_length:>10.6f}  "
              f"{s.n_runs:>6}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"stats": [s.__dict__ for s in stats]}, fh, indent=2)
    return 0


def cmd_mine(args) -> int:
    corpus = Corpus.from_transcripts(load_transcripts(args.transcripts))
    stats = score_ngrams(corpus, args.nmin, args.nmax,
                         exclude_noise=args.exclude_noise)
    threshold = args.threshold
    if threshold is None:
        sweep = threshold_sweep(stats, corpus, _parse_grid(args.thresholds),
                                n_max=args.nmax, n_min=args.nmin)
        threshold = find_knee(sweep)
        print(f"threshold not given; knee of sweep -> {threshold:.4g}")
    vocab = build_vocabulary(stats, threshold, n_max=args.nmax, n_min=args.nmin)
    save_vocabulary(args.out, vocab)
    print(f"{len(vocab.words)} word(s) at threshold {threshold:.4g} -> {args.out}")
    return 0


def cmd_coverage(args) -> int:
    corpus = Corpus.from_transcripts(load_transcripts(args.transcripts))
    vocab = load_vocabulary(args.vocab)
    report = coverage(corpus, vocab)
    print(f"phoneme coverage: {report.phoneme_coverage:.4f}")
    print(f"phone coverage:   {report.phone_coverage:.4f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"phoneme_coverage": report.phoneme_coverage,
                       "phone_coverage": report.phone_coverage}, fh, indent=2)
    return 0


def cmd_sweep(args) -> int:
    corpus = Corpus.from_transcripts(load_transcripts(args.transcripts))
    stats = score_ngrams(corpus, args.nmin, args.nmax)
    sweep = threshold_sweep(stats, corpus, _parse_grid(args.thresholds),
                            n_max=args.nmax, n_min=args.nmin)
    print(f"{'threshold':>10}  {'phoneme':>8}  {'phone':>8}")
    for t, pc, fc in sweep:
        print(f"{t:>10.4g}  {pc:>8.4f}  {fc:>8.4f}")
    print(f"knee: {find_knee(sweep):.4g}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"sweep": [[t, pc, fc] for t, pc, fc in sweep],
                       "knee": find_knee(sweep)}, fh, indent=2)
    return 0


def cmd_annotate(args) -> int:
    from .annotate import transcribe

    bundle = load_bundle(args.bundle)
    clip = load_audio(args.input, working_rate=bundle.feature.sample_rate)
    result = transcribe(clip, bundle)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(result.to_dict(), fh)
    print(f"{len(result.runs)} run(s), {len(result.word_spans)} word span(s) "
          f"-> {args.out}")
    return 0


def cmd_run_all(args) -> int:
    base = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            base = json.load(fh)
    overrides = {
        "input_dir": args.input, "out_dir": args.out, "k": args.k,
        "seed": args.seed, "restarts": args.restarts,
        "tolerance": args.tolerance, "n_min": args.nmin, "n_max": args.nmax,
        "vocab_threshold": args.threshold,
        "scores_dir": args.scores_dir, "tags_file": args.tags,
        "embeddings_dir": args.embeddings_dir,
    }
    for key, value in overrides.items():
        if value is not None:
            base[key] = value
    if args.scan_ks:
        base["scan_ks"] = _parse_int_list(args.scan_ks)
    config = PipelineConfig.from_dict(base)
    result = run_pipeline(config)
    report = result.coverage_report
    print(f"bundle: {result.bundle_path}")
    print(f"vocabulary: {len(result.bundle.vocabulary.words)} word(s) "
          f"at threshold {result.bundle.vocabulary.threshold:.4g}")
    print(f"phoneme coverage {report.phoneme_coverage:.4f}, "
          f"phone coverage {report.phone_coverage:.4f}")
    return 0


def cmd_serve(args) -> int:
    from .service import run_server

    frontend = args.frontend
    if frontend is None:
        default = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        frontend = default if default.is_dir() else None
    run_server(args.bundle, corpus_dir=args.corpus, host=args.host,
               port=args.port, seed=args.seed, frontend_dir=frontend)
    return 0


def cmd_synth_corpus(args) -> int:
    from .synth import make_corpus, write_corpus

    corpus = make_corpus(n_dogs=args.dogs, sentences_per_dog=args.sentences,
                         seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = write_corpus(corpus, out)
    with open(out / "templates.json", "w", encoding="utf-8") as fh:
        json.dump({"templates": [
            {"tones": list(t.tones), "durations": list(t.durations)}
            for t in corpus.templates
        ]}, fh, indent=2)
    print(f"wrote {len(paths)} clip(s) + templates.json under {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="barklex",
        description="discover phoneme-like units and n-gram words in "
                    "vocalization corpora")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("features", help="compute log-mel frame features")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mels", type=int, default=40)
    p.add_argument("--frame", type=float, default=0.02)
    p.add_argument("--hop", type=float, default=0.02)
    p.add_argument("--rate", type=int, default=16000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("segment", help="extract sentence spans from scores")
    p.add_argument("--scores")
    p.add_argument("--input")
    p.add_argument("--tags")
    p.add_argument("--out", required=True)
    p.add_argument("--frame", type=float, default=0.02)
    p.add_argument("--hop", type=float, default=0.02)
    p.add_argument("--gap-max", type=float, default=1.0)
    p.add_argument("--pad", type=float, default=0.5)
    p.add_argument("--tag-threshold", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("quantize-train", help="train the k-means codebook")
    p.add_argument("--features", required=True)
    p.add_argument("--k", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_quantize_train)

    p = sub.add_parser("quantize", help="assign codebook labels to features")
    p.add_argument("--features", required=True)
    p.add_argument("--codebook", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("inertia-scan", help="inertia over a range of k")
    p.add_argument("--features", required=True)
    p.add_argument("--ks", required=True)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_inertia_scan)

    p = sub.add_parser("combine", help="smooth label runs into transcripts")
    p.add_argument("--labels", required=True)
    p.add_argument("--tolerance", type=int, default=1)
    p.add_argument("--noise", help="JSON file with noise_labels list")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("stats", help="per-label run-length statistics")
    p.add_argument("--transcripts", required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("mine", help="mine the n-gram vocabulary")
    p.add_argument("--transcripts", required=True)
    p.add_argument("--nmin", type=int, default=2)
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--threshold", type=float)
    p.add_argument("--thresholds", default="0.02:1.0:0.02",
                   help="sweep grid used when --threshold is omitted")
    p.add_argument("--exclude-noise", action="store_true",
                   help="skip windows touching noise-flagged runs")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("coverage", help="vocabulary coverage of a corpus")
    p.add_argument("--transcripts", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("sweep", help="coverage across a threshold grid")
    p.add_argument("--transcripts", required=True)
    p.add_argument("--thresholds", default="0.02:1.0:0.02")
    p.add_argument("--nmin", type=int, default=2)
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("annotate", help="transcribe one clip with a bundle")
    p.add_argument("--input", required=True)
    p.add_argument("--bundle", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("run-all", help="run the full pipeline")
    p.add_argument("--config", help="PipelineConfig JSON; flags override")
    p.add_argument("--input")
    p.add_argument("--out")
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--tolerance", type=int)
    p.add_argument("--nmin", type=int)
    p.add_argument("--nmax", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--scores-dir")
    p.add_argument("--tags")
    p.add_argument("--embeddings-dir")
    p.add_argument("--scan-ks")
    p.set_defaults(func=cmd_run_all)

    p = sub.add_parser("serve", help="serve the annotation HTTP API")
    p.add_argument("--bundle", required=True)
    p.add_argument("--corpus")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--frontend", help="static assets dir (default: bundled build)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("synth-corpus",
                       help="generate a synthetic tone-template corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--dogs", type=int, default=10)
    p.add_argument("--sentences", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth_corpus)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
