/**
 * Time-aligned transcript tracks.
 *
 * All render helpers are pure DOM builders: they take a payload slice and
 * a container, and produce one element per payload item. Nothing here
 * recomputes labels, spans, or scores — geometry only.
 */

import type { RunSpan, SampleSentence, WordSpan } from './api.js';

/** Deterministic per-label color (golden-ratio hue stepping). */
export function labelColor(label: number): string {
  const hue = (label * 137.508) % 360;
  return `hsl(${hue.toFixed(1)}, 65%, 62%)`;
}

/**
 * Index of the run whose [start, end) interval contains time t, or -1.
 * The interval is half-open, so t exactly at a boundary belongs to the
 * following run.
 */
export function runAtTime(runs: RunSpan[], t: number): number {
  for (let i = 0; i < runs.length; i++) {
    if (t >= runs[i].start && t < runs[i].end) return i;
  }
  return -1;
}

/** Total duration covered by a run list (end of the last run). */
export function runsDuration(runs: RunSpan[]): number {
  return runs.length ? runs[runs.length - 1].end : 0;
}

/**
 * Render one block per combined run, width proportional to duration.
 * Noise runs get the `noise` class on top of `run`.
 */
export function renderRuns(
  container: HTMLElement,
  runs: RunSpan[],
  duration: number,
): HTMLElement[] {
  const blocks: HTMLElement[] = [];
  const total = duration > 0 ? duration : 1;
  runs.forEach((run, i) => {
    const el = document.createElement('div');
    el.className = run.noise ? 'run noise' : 'run';
    el.style.width = `${(((run.end - run.start) / total) * 100).toFixed(4)}%`;
    el.style.background = labelColor(run.label);
    el.textContent = String(run.label);
    el.dataset.index = String(i);
    el.dataset.label = String(run.label);
    el.title = `label ${run.label}  ${run.start.toFixed(3)}–${run.end.toFixed(3)} s`;
    container.appendChild(el);
    blocks.push(el);
  });
  return blocks;
}

/**
 * Render the unsmoothed per-frame label strip: one cell per raw frame.
 */
export function renderRawLabels(
  container: HTMLElement,
  rawLabels: number[],
  frameDuration: number,
  duration: number,
): HTMLElement[] {
  const cells: HTMLElement[] = [];
  const total = duration > 0 ? duration : 1;
  rawLabels.forEach((label, i) => {
    const el = document.createElement('div');
    el.className = 'raw-cell';
    el.style.width = `${((frameDuration / total) * 100).toFixed(4)}%`;
    el.style.background = labelColor(label);
    el.dataset.index = String(i);
    el.dataset.label = String(label);
    container.appendChild(el);
    cells.push(el);
  });
  return cells;
}

/**
 * Render word-span highlights as absolutely positioned overlays. The
 * container is expected to be position:relative and as wide as the clip.
 */
export function renderWordSpans(
  container: HTMLElement,
  spans: WordSpan[],
  duration: number,
): HTMLElement[] {
  const out: HTMLElement[] = [];
  const total = duration > 0 ? duration : 1;
  spans.forEach((span, i) => {
    const el = document.createElement('div');
    el.className = 'word-span';
    el.style.left = `${((span.start / total) * 100).toFixed(4)}%`;
    el.style.width = `${(((span.end - span.start) / total) * 100).toFixed(4)}%`;
    el.textContent = span.ngram.join('·');
    el.dataset.index = String(i);
    el.title = `word (${span.ngram.join(',')})  runs ${span.start_run}–${span.end_run}`;
    container.appendChild(el);
    out.push(el);
  });
  return out;
}

/**
 * Polyline points for the energy diagram, mapped into a width x height
 * box with the peak at the top.
 */
export function energyPolylinePoints(
  values: number[],
  width: number,
  height: number,
): string {
  if (values.length === 0) return '';
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  const range = hi - lo > 0 ? hi - lo : 1;
  const step = values.length > 1 ? width / (values.length - 1) : 0;
  return values
    .map((v, i) => {
      const x = i * step;
      const y = height - ((v - lo) / range) * height;
      return `${x.toFixed(2)},${y.toFixed(2)}`;
    })
    .join(' ');
}

/**
 * Expand a stored sample's run-length pairs into timed RunSpans so the
 * same track renderer can draw corpus sentences.
 */
export function sampleToRuns(sample: SampleSentence): RunSpan[] {
  const out: RunSpan[] = [];
  let frame = 0;
  sample.runs.forEach((pair, i) => {
    const [label, length] = pair;
    out.push({
      label,
      start: frame * sample.frame_duration,
      end: (frame + length) * sample.frame_duration,
      noise: sample.noise_flags[i] ?? false,
    });
    frame += length;
  });
  return out;
}
