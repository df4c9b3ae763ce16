"""HTTP annotation service.

Exposes the trained model over JSON: upload-and-transcribe, the mined
vocabulary, per-phoneme exemplars with audio, and random training
sentences. All state is read-only after startup; audio snippets are cut
from the stored corpus sentences on demand and cached.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .annotate import extract_exemplars, transcribe
from .audio import AudioLoadError, load_audio, save_wav
from .bundle import ModelBundle, load_bundle
from .combine import load_transcripts
from .mine import match_words
from .quantize import project_centroids_2d

MAX_UPLOAD_BYTES = 25 * 1024 * 1024
MAX_EXEMPLARS_PER_LABEL = 10
DEFAULT_SAMPLE_COUNT = 20


@dataclass
class ServiceState:
    """Everything a request handler may read; immutable after startup."""

    bundle: ModelBundle | None = None
    seed: int = 0
    max_upload: int = MAX_UPLOAD_BYTES
    transcripts: list = field(default_factory=list)
    sentence_paths: dict = field(default_factory=dict)
    exemplars: dict = field(default_factory=dict)
    pca: np.ndarray | None = None
    stats_by_label: dict = field(default_factory=dict)
    audio_cache: dict = field(default_factory=dict)


def _index_corpus(state: ServiceState, corpus_dir) -> None:
    """Load stored sentences + transcripts and precompute exemplar lists."""
    corpus_dir = Path(corpus_dir)
    tpath = corpus_dir / "transcripts.ndjson"
    if tpath.exists():
        state.transcripts = load_transcripts(tpath)
    sdir = corpus_dir / "sentences"
    if not sdir.is_dir():
        sdir = corpus_dir
    for wav in sorted(sdir.glob("*.wav")):
        state.sentence_paths[wav.stem] = wav
    # keep only transcripts whose audio is present (ids are sanitized on disk)
    state.transcripts = [
        t for t in state.transcripts
        if t.sentence_id.replace("/", "_") in state.sentence_paths
    ]
    for label in range(state.bundle.codebook.k):
        state.exemplars[label] = extract_exemplars(
            state.transcripts, label,
            max_count=MAX_EXEMPLARS_PER_LABEL, seed=state.seed)


def build_state(bundle: ModelBundle | None, corpus_dir=None,
                seed: int = 0, max_upload: int = MAX_UPLOAD_BYTES) -> ServiceState:
    state = ServiceState(bundle=bundle, seed=seed, max_upload=max_upload)
    if bundle is not None:
        state.pca = project_centroids_2d(bundle.codebook)
        state.stats_by_label = {s.label: s for s in bundle.phoneme_stats}
        if corpus_dir is not None:
            _index_corpus(state, corpus_dir)
    return state


def _wav_bytes(clip) -> bytes:
    buf = io.BytesIO()
    save_wav(buf, clip)
    return buf.getvalue()


def _load_sentence(state: ServiceState, sentence_id: str):
    path = state.sentence_paths.get(sentence_id.replace("/", "_"))
    if path is None:
        raise HTTPException(status_code=404, detail="unknown sentence")
    return load_audio(path, working_rate=state.bundle.feature.sample_rate)


def _cut_audio(state: ServiceState, cache_key: str, sentence_id: str,
               start: float, end: float) -> bytes:
    cached = state.audio_cache.get(cache_key)
    if cached is not None:
        return cached
    clip = _load_sentence(state, sentence_id)
    lo = int(round(start * clip.sample_rate))
    hi = min(int(round(end * clip.sample_rate)), len(clip.samples))
    if hi <= lo:
        raise HTTPException(status_code=404, detail="empty audio span")
    from .audio import AudioClip

    data = _wav_bytes(AudioClip(clip.samples[lo:hi], clip.sample_rate))
    state.audio_cache[cache_key] = data
    return data


def _word_spans_for(state: ServiceState, transcript) -> list[dict]:
    spans = match_words(transcript.labels, state.bundle.vocabulary.words)
    fd = transcript.frame_duration
    offsets = np.concatenate([[0], np.cumsum([n for _, n in transcript.runs])])
    return [
        {"ngram": list(s.ngram),
         "start": float(offsets[s.start] * fd),
         "end": float(offsets[s.end] * fd)}
        for s in spans
    ]


def create_app(bundle: ModelBundle | str | Path | None = None, corpus_dir=None,
               seed: int = 0, max_upload: int = MAX_UPLOAD_BYTES,
               frontend_dir=None) -> FastAPI:
    """Build the FastAPI app around a loaded bundle.

    bundle may be a ModelBundle, a path to one, or None (all model
    endpoints then answer 503).
    """
    if isinstance(bundle, (str, Path)):
        bundle = load_bundle(bundle)
    state = build_state(bundle, corpus_dir, seed=seed, max_upload=max_upload)
    app = FastAPI(title="vocalization annotation service")
    app.state.service = state
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"],
    )

    def require_bundle() -> ServiceState:
        if state.bundle is None:
            raise HTTPException(status_code=503, detail="bundle not loaded")
        return state

    @app.get("/api/health")
    def health():
        return {"status": "ok", "bundle_loaded": state.bundle is not None,
                "k": state.bundle.codebook.k if state.bundle else None,
                "n_sentences": len(state.transcripts)}

    @app.post("/api/transcribe")
    async def transcribe_upload(request: Request):
        st = require_bundle()
        length = request.headers.get("content-length")
        if length is not None and int(length) > st.max_upload:
            raise HTTPException(status_code=413, detail="upload too large")
        form = await request.form()
        upload = form.get("file")
        if upload is None or isinstance(upload, str):
            raise HTTPException(status_code=400, detail="missing file field")
        data = await upload.read()
        if len(data) > st.max_upload:
            raise HTTPException(status_code=413, detail="upload too large")
        if not data:
            raise HTTPException(status_code=400, detail="empty body")
        try:
            clip = load_audio(io.BytesIO(data), working_rate=st.bundle.feature.sample_rate,
                              source_id=getattr(upload, "filename", "") or "upload")
        except AudioLoadError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if clip.duration < st.bundle.feature.frame_duration:
            raise HTTPException(status_code=422, detail="clip too short")
        result = transcribe(clip, st.bundle)
        return result.to_dict()

    @app.get("/api/vocabulary")
    def vocabulary():
        st = require_bundle()
        payload = st.bundle.vocabulary.to_dict()
        # word index doubles as the id for /api/words/{index}/audio
        for i, w in enumerate(payload["words"]):
            w["id"] = i
        return payload

    @app.get("/api/phonemes")
    def phonemes():
        st = require_bundle()
        entries = []
        for label in range(st.bundle.codebook.k):
            stat = st.stats_by_label.get(label)
            entries.append({
                "label": label,
                "noise": label in st.bundle.noise_labels,
                "pca": [float(st.pca[label, 0]), float(st.pca[label, 1])],
                "stats": None if stat is None else {
                    "mean_length": stat.mean_length,
                    "var_length": stat.var_length,
                    "n_runs": stat.n_runs,
                },
                "n_exemplars": len(st.exemplars.get(label, [])),
            })
        return {"k": st.bundle.codebook.k, "phonemes": entries}

    @app.get("/api/phonemes/{label}/exemplars")
    def phoneme_exemplars(label: int):
        st = require_bundle()
        if not 0 <= label < st.bundle.codebook.k:
            raise HTTPException(status_code=404, detail="unknown label")
        return {"label": label, "exemplars": [
            {"id": f"{label}-{i}", "label": ex.label, "sentence_id": ex.sentence_id,
             "start": ex.start, "end": ex.end, "n_frames": ex.n_frames}
            for i, ex in enumerate(st.exemplars.get(label, []))
        ]}

    @app.get("/api/exemplars/{exemplar_id}/audio")
    def exemplar_audio(exemplar_id: str):
        st = require_bundle()
        try:
            label_s, idx_s = exemplar_id.rsplit("-", 1)
            label, idx = int(label_s), int(idx_s)
        except ValueError:
            raise HTTPException(status_code=404, detail="unknown exemplar")
        pool = st.exemplars.get(label, [])
        if not 0 <= idx < len(pool):
            raise HTTPException(status_code=404, detail="unknown exemplar")
        ex = pool[idx]
        data = _cut_audio(st, f"ex:{exemplar_id}", ex.sentence_id, ex.start, ex.end)
        return Response(content=data, media_type="audio/wav")

    @app.get("/api/words/{index}/audio")
    def word_audio(index: int):
        st = require_bundle()
        words = st.bundle.vocabulary.words
        if not 0 <= index < len(words):
            raise HTTPException(status_code=404, detail="unknown word")
        ngram = words[index].ngram
        fd = st.bundle.feature.frame_duration
        for t in st.transcripts:
            labels = t.labels
            for pos in range(len(labels) - len(ngram) + 1):
                if labels[pos:pos + len(ngram)] == ngram:
                    offsets = np.concatenate([[0], np.cumsum([n for _, n in t.runs])])
                    start = float(offsets[pos] * fd)
                    end = float(offsets[pos + len(ngram)] * fd)
                    data = _cut_audio(st, f"word:{index}", t.sentence_id, start, end)
                    return Response(content=data, media_type="audio/wav")
        raise HTTPException(status_code=404, detail="no stored occurrence")

    @app.get("/api/samples")
    def samples(count: int = Query(DEFAULT_SAMPLE_COUNT, ge=1, le=500)):
        st = require_bundle()
        n = len(st.transcripts)
        take = min(count, n)
        # fresh generator per request so identical requests answer identically
        rng = np.random.default_rng([st.seed, count])
        picked = sorted(rng.choice(n, size=take, replace=False).tolist()) if n else []
        out = []
        for i in picked:
            t = st.transcripts[i]
            flags = t.noise_flags or [False] * len(t.runs)
            out.append({
                "id": t.sentence_id,
                "dog_id": t.dog_id,
                "duration": t.duration,
                "frame_duration": t.frame_duration,
                "runs": [[int(l), int(c)] for l, c in t.runs],
                "noise_flags": [bool(f) for f in flags],
                "words": _word_spans_for(st, t),
            })
        return {"count": len(out), "samples": out}

    @app.get("/api/samples/{sentence_id}/audio")
    def sample_audio(sentence_id: str):
        st = require_bundle()
        key = f"sent:{sentence_id}"
        cached = st.audio_cache.get(key)
        if cached is None:
            cached = _wav_bytes(_load_sentence(st, sentence_id))
            st.audio_cache[key] = cached
        return Response(content=cached, media_type="audio/wav")

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True),
                  name="frontend")

    return app


def run_server(bundle_path, corpus_dir=None, host: str = "127.0.0.1",
               port: int = 8080, seed: int = 0, frontend_dir=None) -> None:
    import uvicorn

    app = create_app(bundle_path, corpus_dir=corpus_dir, seed=seed,
                     frontend_dir=frontend_dir)
    uvicorn.run(app, host=host, port=port)
