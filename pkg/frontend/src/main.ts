/**
 * Single-page shell over the annotation service: an introduction page
 * (phoneme scatter with exemplar audition), a transcription workspace,
 * the mined vocabulary, and a corpus sample browser.
 *
 * Routing is hash-based (#/intro, #/transcribe, #/vocabulary, #/samples)
 * so the built assets can be served statically by the API process.
 */

import {
  ApiError,
  exemplarAudioUrl,
  getExemplars,
  getHealth,
  getPhonemes,
  getSamples,
  getVocabulary,
  sampleAudioUrl,
  transcribe,
  wordAudioUrl,
} from './api.js';
import type { AnnotatedTranscript, SampleSentence } from './api.js';
import { renderScatter } from './scatter.js';
import { drawSpectrogram } from './spectrogram.js';
import {
  energyPolylinePoints,
  labelColor,
  renderRawLabels,
  renderRuns,
  renderWordSpans,
  sampleToRuns,
} from './transcript.js';
import { isSortedByOrderThenPs, renderVocabulary } from './vocabulary.js';

type Route = 'intro' | 'transcribe' | 'vocabulary' | 'samples';

const ROUTES: Route[] = ['intro', 'transcribe', 'vocabulary', 'samples'];
const TITLES: Record<Route, string> = {
  intro: 'Phonemes',
  transcribe: 'Transcribe',
  vocabulary: 'Vocabulary',
  samples: 'Samples',
};

let pageEl: HTMLElement | null = null;
let navEl: HTMLElement | null = null;
let renderedRoute: Route | null = null;
let listenerInstalled = false;
let lastLoad: Promise<void> = Promise.resolve();
let player: HTMLAudioElement | null = null;

/** Resolves when the most recently started page load or upload settles. */
export function whenSettled(): Promise<void> {
  return lastLoad;
}

function currentRoute(): Route {
  const name = window.location.hash.replace(/^#\/?/, '');
  return (ROUTES as string[]).includes(name) ? (name as Route) : 'intro';
}

function audioPlayer(): HTMLAudioElement {
  if (!player) {
    player = document.createElement('audio');
    player.id = 'player';
  }
  if (!player.isConnected) document.body.appendChild(player);
  return player;
}

function playUrl(url: string): void {
  const el = audioPlayer();
  el.src = url;
  const p = el.play() as Promise<void> | undefined;
  if (p && typeof p.catch === 'function') p.catch(() => {});
}

/** Play [start, end) seconds of a local clip URL, pausing at the end. */
function playSegment(url: string, start: number, end: number): void {
  const el = audioPlayer();
  el.src = url;
  el.currentTime = start;
  const onTime = () => {
    if (el.currentTime >= end) {
      el.pause();
      el.removeEventListener('timeupdate', onTime);
    }
  };
  el.addEventListener('timeupdate', onTime);
  const p = el.play() as Promise<void> | undefined;
  if (p && typeof p.catch === 'function') p.catch(() => {});
}

function clear(el: HTMLElement): void {
  while (el.firstChild) el.removeChild(el.firstChild);
}

function heading(page: HTMLElement, title: string, blurb: string): void {
  const h = document.createElement('h2');
  h.textContent = title;
  page.appendChild(h);
  const p = document.createElement('p');
  p.className = 'blurb';
  p.textContent = blurb;
  page.appendChild(p);
}

/** Full-page banner with a retry button, shown when the service fails. */
function showBanner(page: HTMLElement, err: unknown): void {
  const banner = document.createElement('div');
  banner.className = 'banner';
  const msg = document.createElement('span');
  msg.textContent =
    err instanceof ApiError && err.status === null
      ? 'The annotation service is unreachable.'
      : `Request failed: ${err instanceof Error ? err.message : String(err)}`;
  banner.appendChild(msg);
  const retry = document.createElement('button');
  retry.className = 'retry';
  retry.textContent = 'Retry';
  retry.addEventListener('click', () => {
    renderedRoute = null;
    lastLoad = requestRender();
  });
  banner.appendChild(retry);
  page.appendChild(banner);
}

// ---------------------------------------------------------------- intro

async function renderIntro(page: HTMLElement): Promise<void> {
  const [health, catalog] = await Promise.all([getHealth(), getPhonemes()]);
  heading(
    page,
    'Phoneme space',
    `${catalog.k} k-means labels over ${health.n_sentences} corpus sentences. ` +
      'Centroids are projected to two principal components; hollow dashed ' +
      'points are noise labels. Click a point to hear stored exemplars.',
  );

  const wrap = document.createElement('div');
  wrap.className = 'scatter-wrap';
  const svg = document.createElementNS('http://www.w3.org/2000/svg', 'svg');
  svg.id = 'phoneme-scatter';
  wrap.appendChild(svg);
  const panel = document.createElement('div');
  panel.id = 'exemplar-panel';
  panel.textContent = 'No phoneme selected.';
  wrap.appendChild(panel);
  page.appendChild(wrap);

  renderScatter(svg, catalog.phonemes, {
    onSelect: (label) => {
      lastLoad = showExemplars(panel, label);
    },
  });
}

async function showExemplars(panel: HTMLElement, label: number): Promise<void> {
  clear(panel);
  const title = document.createElement('h3');
  title.textContent = `Phoneme ${label}`;
  panel.appendChild(title);
  try {
    const listing = await getExemplars(label);
    if (listing.exemplars.length === 0) {
      const p = document.createElement('p');
      p.textContent = 'No stored runs for this label.';
      panel.appendChild(p);
      return;
    }
    const ul = document.createElement('ul');
    ul.className = 'exemplars';
    for (const ex of listing.exemplars) {
      const li = document.createElement('li');
      const button = document.createElement('button');
      button.className = 'play-exemplar';
      button.textContent = '▶';
      button.dataset.exemplarId = ex.id;
      button.addEventListener('click', () => playUrl(exemplarAudioUrl(ex.id)));
      li.appendChild(button);
      const span = document.createElement('span');
      span.textContent = ` ${ex.id}  ${(ex.end - ex.start).toFixed(3)} s  (${ex.sentence_id})`;
      li.appendChild(span);
      ul.appendChild(li);
    }
    panel.appendChild(ul);
  } catch (err) {
    showBanner(panel, err);
  }
}

// ----------------------------------------------------------- transcribe

async function renderTranscribe(page: HTMLElement): Promise<void> {
  heading(
    page,
    'Transcription workspace',
    'Upload a WAV clip to see its energy curve, spectrogram, raw per-frame ' +
      'labels, smoothed runs, and any vocabulary words found. Click a run or ' +
      'word span to play that part of your clip; click a legend chip to hear ' +
      'a stored exemplar of the phoneme.',
  );

  const input = document.createElement('input');
  input.type = 'file';
  input.id = 'clip-input';
  input.accept = 'audio/wav,.wav';
  page.appendChild(input);

  const out = document.createElement('div');
  out.id = 'annotation';
  page.appendChild(out);

  input.addEventListener('change', () => {
    const file = input.files && input.files[0];
    if (!file) return;
    lastLoad = handleUpload(out, file);
  });
}

async function handleUpload(out: HTMLElement, file: File): Promise<void> {
  clear(out);
  const status = document.createElement('p');
  status.className = 'status';
  status.textContent = `Transcribing ${file.name}…`;
  out.appendChild(status);
  try {
    const annotated = await transcribe(file);
    clear(out);
    const clipUrl =
      typeof URL !== 'undefined' && typeof URL.createObjectURL === 'function'
        ? URL.createObjectURL(file)
        : null;
    renderAnnotation(out, annotated, clipUrl);
  } catch (err) {
    clear(out);
    const box = document.createElement('div');
    box.className = 'upload-error';
    box.textContent =
      err instanceof ApiError
        ? `Upload rejected: ${err.message}`
        : `Upload failed: ${String(err)}`;
    out.appendChild(box);
  }
}

function renderAnnotation(
  out: HTMLElement,
  annotated: AnnotatedTranscript,
  clipUrl: string | null,
): void {
  const duration = annotated.raw_labels.length * annotated.frame_duration;

  const summary = document.createElement('p');
  summary.className = 'summary';
  summary.textContent =
    `${duration.toFixed(2)} s · ${annotated.runs.length} runs · ` +
    `${annotated.word_spans.length} word spans`;
  out.appendChild(summary);

  // energy diagram
  const energySvg = document.createElementNS('http://www.w3.org/2000/svg', 'svg');
  energySvg.setAttribute('class', 'energy');
  energySvg.setAttribute('viewBox', '0 0 600 80');
  energySvg.setAttribute('preserveAspectRatio', 'none');
  const line = document.createElementNS('http://www.w3.org/2000/svg', 'polyline');
  line.setAttribute('points', energyPolylinePoints(annotated.energy.values, 600, 80));
  line.setAttribute('fill', 'none');
  line.setAttribute('stroke', '#3f6fb5');
  energySvg.appendChild(line);
  out.appendChild(energySvg);

  // spectrogram (no-op under DOMs without a 2d canvas context)
  const canvas = document.createElement('canvas');
  canvas.className = 'spectrogram';
  drawSpectrogram(canvas, annotated.spectrogram);
  out.appendChild(canvas);

  // raw per-frame labels above, combined runs below
  const rawTrack = document.createElement('div');
  rawTrack.className = 'track raw';
  renderRawLabels(rawTrack, annotated.raw_labels, annotated.frame_duration, duration);
  out.appendChild(rawTrack);

  const runTrack = document.createElement('div');
  runTrack.className = 'track runs';
  renderRuns(runTrack, annotated.runs, duration);
  out.appendChild(runTrack);

  const spanTrack = document.createElement('div');
  spanTrack.className = 'track spans';
  renderWordSpans(spanTrack, annotated.word_spans, duration);
  out.appendChild(spanTrack);

  if (clipUrl) {
    runTrack.addEventListener('click', (ev) => {
      const target = (ev.target as HTMLElement).closest('.run') as HTMLElement | null;
      if (!target || target.dataset.index === undefined) return;
      const run = annotated.runs[Number(target.dataset.index)];
      playSegment(clipUrl, run.start, run.end);
    });
    spanTrack.addEventListener('click', (ev) => {
      const target = (ev.target as HTMLElement).closest('.word-span') as HTMLElement | null;
      if (!target || target.dataset.index === undefined) return;
      const span = annotated.word_spans[Number(target.dataset.index)];
      playSegment(clipUrl, span.start, span.end);
    });
  }

  // legend: distinct labels in this clip; click plays a stored exemplar
  const legend = document.createElement('div');
  legend.className = 'legend';
  const seen = [...new Set(annotated.runs.map((r) => r.label))].sort((a, b) => a - b);
  for (const label of seen) {
    const chip = document.createElement('button');
    chip.className = 'chip';
    chip.textContent = String(label);
    chip.style.background = labelColor(label);
    chip.dataset.label = String(label);
    chip.addEventListener('click', () => {
      lastLoad = auditionPhoneme(label);
    });
    legend.appendChild(chip);
  }
  out.appendChild(legend);
}

async function auditionPhoneme(label: number): Promise<void> {
  try {
    const listing = await getExemplars(label);
    if (listing.exemplars.length > 0) {
      playUrl(exemplarAudioUrl(listing.exemplars[0].id));
    }
  } catch {
    // exemplar audition is best-effort; the workspace stays usable
  }
}

// ----------------------------------------------------------- vocabulary

async function renderVocabularyPage(page: HTMLElement): Promise<void> {
  const vocab = await getVocabulary();
  heading(
    page,
    'Vocabulary',
    `${vocab.words.length} words above popularity threshold ` +
      `${vocab.threshold.toFixed(3)}, longest first. Press ▶ to hear the ` +
      'first stored occurrence.',
  );
  if (!isSortedByOrderThenPs(vocab.words)) {
    console.warn('vocabulary payload is not in (order, ps) sort order');
  }

  const table = document.createElement('table');
  table.id = 'vocab-table';
  const thead = document.createElement('thead');
  const headRow = document.createElement('tr');
  for (const name of ['#', 'word', 'n', 'count', 'f', 'δ', 'ps', '']) {
    const th = document.createElement('th');
    th.textContent = name;
    headRow.appendChild(th);
  }
  thead.appendChild(headRow);
  table.appendChild(thead);
  const tbody = document.createElement('tbody');
  renderVocabulary(tbody, vocab.words, {
    onPlay: (wordId) => playUrl(wordAudioUrl(wordId)),
  });
  table.appendChild(tbody);
  page.appendChild(table);
}

// -------------------------------------------------------------- samples

async function renderSamples(page: HTMLElement): Promise<void> {
  const listing = await getSamples(20);
  heading(
    page,
    'Corpus samples',
    `${listing.count} randomly drawn sentences from the stored corpus, ` +
      'with their transcripts and any vocabulary words found.',
  );

  const list = document.createElement('div');
  list.id = 'sample-list';
  for (const sample of listing.samples) {
    list.appendChild(sampleCard(sample));
  }
  page.appendChild(list);
}

function sampleCard(sample: SampleSentence): HTMLElement {
  const card = document.createElement('div');
  card.className = 'sample-card';

  const head = document.createElement('div');
  head.className = 'sample-head';
  const button = document.createElement('button');
  button.className = 'play-sample';
  button.textContent = '▶';
  button.dataset.sampleId = sample.id;
  button.addEventListener('click', () => playUrl(sampleAudioUrl(sample.id)));
  head.appendChild(button);
  const title = document.createElement('span');
  title.textContent = ` ${sample.id} · dog ${sample.dog_id} · ${sample.duration.toFixed(2)} s`;
  head.appendChild(title);
  card.appendChild(head);

  const track = document.createElement('div');
  track.className = 'track runs';
  renderRuns(track, sampleToRuns(sample), sample.duration);
  card.appendChild(track);

  if (sample.words.length > 0) {
    const words = document.createElement('div');
    words.className = 'sample-words';
    for (const w of sample.words) {
      const chip = document.createElement('span');
      chip.className = 'word-chip';
      chip.textContent = `(${w.ngram.join(',')}) ${w.start.toFixed(2)}–${w.end.toFixed(2)} s`;
      words.appendChild(chip);
    }
    card.appendChild(words);
  }
  return card;
}

// --------------------------------------------------------------- router

const LOADERS: Record<Route, (page: HTMLElement) => Promise<void>> = {
  intro: renderIntro,
  transcribe: renderTranscribe,
  vocabulary: renderVocabularyPage,
  samples: renderSamples,
};

async function renderRoute(route: Route): Promise<void> {
  if (!pageEl || !navEl) return;
  for (const link of navEl.querySelectorAll('a')) {
    link.classList.toggle('active', link.dataset.route === route);
  }
  // Each render gets its own container; a superseded loader keeps
  // writing into a detached node instead of the next page.
  clear(pageEl);
  const body = document.createElement('div');
  body.className = 'page-body';
  pageEl.appendChild(body);
  try {
    await LOADERS[route](body);
  } catch (err) {
    clear(body);
    showBanner(body, err);
  }
}

/**
 * Render the current route unless it is already rendered (or rendering).
 * Duplicate calls while a render is in flight return the same promise,
 * so awaiting any caller means the page really settled.
 */
function requestRender(): Promise<void> {
  const route = currentRoute();
  if (route === renderedRoute) return lastLoad;
  renderedRoute = route;
  lastLoad = renderRoute(route);
  return lastLoad;
}

/**
 * Navigate to a route (e.g. "#/vocabulary") and resolve when its page
 * has rendered. Also used by the hashchange listener.
 */
export function navigate(hash: string): Promise<void> {
  if (window.location.hash !== hash) window.location.hash = hash;
  return requestRender();
}

/** Build the nav + page container inside `root` and render the route. */
export function mountApp(root: HTMLElement): void {
  clear(root);
  renderedRoute = null;

  navEl = document.createElement('nav');
  for (const route of ROUTES) {
    const a = document.createElement('a');
    a.href = `#/${route}`;
    a.textContent = TITLES[route];
    a.dataset.route = route;
    navEl.appendChild(a);
  }
  root.appendChild(navEl);

  pageEl = document.createElement('main');
  pageEl.id = 'page';
  root.appendChild(pageEl);

  if (!listenerInstalled) {
    listenerInstalled = true;
    window.addEventListener('hashchange', () => {
      requestRender();
    });
  }
  requestRender();
}

const rootEl = document.getElementById('app');
if (rootEl) mountApp(rootEl);
