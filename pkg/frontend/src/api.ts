/**
 * Typed client for the annotation service JSON API.
 *
 * Every interface here mirrors a response schema from the service's
 * OpenAPI document one-to-one; the UI never derives numbers of its own.
 */

export interface HealthInfo {
  status: string;
  bundle_loaded: boolean;
  k: number | null;
  n_sentences: number;
}

/** One combined (smoothed) run of identical labels, in seconds. */
export interface RunSpan {
  label: number;
  start: number;
  end: number;
  noise: boolean;
}

/** A vocabulary word matched against the run sequence. */
export interface WordSpan {
  ngram: number[];
  start_run: number;
  end_run: number;
  start: number;
  end: number;
}

export interface EnergyTrack {
  values: number[];
  hop: number;
}

/** Row-major little-endian float32 grid, base64-encoded. */
export interface SpectrogramGrid {
  n_frames: number;
  n_bins: number;
  data: string;
}

export interface AnnotatedTranscript {
  sentence_id: string;
  frame_duration: number;
  runs: RunSpan[];
  word_spans: WordSpan[];
  raw_labels: number[];
  energy: EnergyTrack;
  spectrogram: SpectrogramGrid;
}

export interface VocabularyWord {
  ngram: number[];
  count: number;
  f: number;
  delta: number;
  ps: number;
  id: number;
}

export interface Vocabulary {
  threshold: number;
  words: VocabularyWord[];
}

export interface PhonemeStats {
  mean_length: number;
  var_length: number;
  n_runs: number;
}

export interface PhonemeEntry {
  label: number;
  noise: boolean;
  pca: number[];
  stats: PhonemeStats | null;
  n_exemplars: number;
}

export interface PhonemeList {
  k: number;
  phonemes: PhonemeEntry[];
}

export interface Exemplar {
  id: string;
  label: number;
  sentence_id: string;
  start: number;
  end: number;
  n_frames: number;
}

export interface ExemplarList {
  label: number;
  exemplars: Exemplar[];
}

export interface SampleWord {
  ngram: number[];
  start: number;
  end: number;
}

export interface SampleSentence {
  id: string;
  dog_id: string;
  duration: number;
  frame_duration: number;
  /** Run-length pairs [label, n_frames]. */
  runs: number[][];
  noise_flags: boolean[];
  words: SampleWord[];
}

export interface SampleList {
  count: number;
  samples: SampleSentence[];
}

/**
 * Error raised for any failed request. `status` is the HTTP status, or
 * null when the service could not be reached at all.
 */
export class ApiError extends Error {
  status: number | null;

  constructor(message: string, status: number | null) {
    super(message);
    this.name = 'ApiError';
    this.status = status;
  }
}

async function fetchJson<T>(url: string, init?: RequestInit): Promise<T> {
  let resp: Response;
  try {
    resp = await fetch(url, init);
  } catch (err) {
    throw new ApiError(`service unreachable: ${String(err)}`, null);
  }
  if (!resp.ok) {
    let detail = `${resp.status} ${resp.statusText}`;
    try {
      const body = await resp.json();
      if (body && typeof body.detail === 'string') detail = body.detail;
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ApiError(detail, resp.status);
  }
  return (await resp.json()) as T;
}

export function getHealth(): Promise<HealthInfo> {
  return fetchJson<HealthInfo>('/api/health');
}

export function getVocabulary(): Promise<Vocabulary> {
  return fetchJson<Vocabulary>('/api/vocabulary');
}

export function getPhonemes(): Promise<PhonemeList> {
  return fetchJson<PhonemeList>('/api/phonemes');
}

export function getExemplars(label: number): Promise<ExemplarList> {
  return fetchJson<ExemplarList>(`/api/phonemes/${label}/exemplars`);
}

export function getSamples(count = 20): Promise<SampleList> {
  return fetchJson<SampleList>(`/api/samples?count=${count}`);
}

/** Upload a clip and receive its full annotation. */
export function transcribe(file: File): Promise<AnnotatedTranscript> {
  const form = new FormData();
  form.append('file', file, file.name || 'upload.wav');
  return fetchJson<AnnotatedTranscript>('/api/transcribe', {
    method: 'POST',
    body: form,
  });
}

/**
 * Audio endpoint URLs. Ids coming from the service may contain characters
 * like '#' (sentence ids embed a clip/sentence separator), so path
 * segments are always percent-encoded.
 */
export function exemplarAudioUrl(exemplarId: string): string {
  return `/api/exemplars/${encodeURIComponent(exemplarId)}/audio`;
}

export function wordAudioUrl(wordId: number): string {
  return `/api/words/${wordId}/audio`;
}

export function sampleAudioUrl(sentenceId: string): string {
  return `/api/samples/${encodeURIComponent(sentenceId)}/audio`;
}
