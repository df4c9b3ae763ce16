/**
 * Client-side spectrogram heatmap.
 *
 * The service ships the log-mel grid as base64 of row-major little-endian
 * float32 (n_frames rows x n_bins columns). Decoding and pixel mapping are
 * pure functions; only drawSpectrogram touches a canvas.
 */

import type { SpectrogramGrid } from './api.js';

/** Decode the base64 payload into a Float32Array (explicit little-endian). */
export function decodeF32(base64: string): Float32Array {
  const raw = atob(base64);
  const bytes = new Uint8Array(raw.length);
  for (let i = 0; i < raw.length; i++) bytes[i] = raw.charCodeAt(i);
  const view = new DataView(bytes.buffer);
  const out = new Float32Array(bytes.length / 4);
  for (let i = 0; i < out.length; i++) {
    out[i] = view.getFloat32(i * 4, true);
  }
  return out;
}

/**
 * Fixed color ramp (dark violet -> magenta -> orange -> pale yellow).
 * Stops are part of the UI contract so screenshots stay reproducible.
 */
export const COLOR_STOPS: ReadonlyArray<readonly [number, number, number, number]> = [
  [0.0, 13, 8, 135],
  [0.33, 140, 41, 129],
  [0.66, 244, 136, 73],
  [1.0, 240, 249, 33],
];

/** Map a normalized value in [0, 1] to an [r, g, b] triple on the ramp. */
export function colormap(t: number): [number, number, number] {
  const x = t <= 0 ? 0 : t >= 1 ? 1 : t;
  for (let i = 1; i < COLOR_STOPS.length; i++) {
    const [t1, r1, g1, b1] = COLOR_STOPS[i];
    if (x <= t1) {
      const [t0, r0, g0, b0] = COLOR_STOPS[i - 1];
      const u = t1 > t0 ? (x - t0) / (t1 - t0) : 0;
      return [
        Math.round(r0 + (r1 - r0) * u),
        Math.round(g0 + (g1 - g0) * u),
        Math.round(b0 + (b1 - b0) * u),
      ];
    }
  }
  const last = COLOR_STOPS[COLOR_STOPS.length - 1];
  return [last[1], last[2], last[3]];
}

export interface PixelGrid {
  width: number;
  height: number;
  /** RGBA, row 0 = highest mel bin so low frequencies sit at the bottom. */
  pixels: Uint8ClampedArray;
}

/**
 * Turn the float grid into an RGBA pixel buffer, one pixel per cell,
 * min-max normalized over the whole grid.
 */
export function gridToPixels(spec: SpectrogramGrid): PixelGrid {
  const values = decodeF32(spec.data);
  const { n_frames: width, n_bins: height } = spec;
  if (values.length !== width * height) {
    throw new Error(
      `spectrogram payload has ${values.length} values, expected ${width * height}`,
    );
  }
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  const range = hi - lo > 0 ? hi - lo : 1;
  const pixels = new Uint8ClampedArray(width * height * 4);
  for (let x = 0; x < width; x++) {
    for (let bin = 0; bin < height; bin++) {
      const v = (values[x * height + bin] - lo) / range;
      const [r, g, b] = colormap(v);
      const y = height - 1 - bin;
      const o = (y * width + x) * 4;
      pixels[o] = r;
      pixels[o + 1] = g;
      pixels[o + 2] = b;
      pixels[o + 3] = 255;
    }
  }
  return { width, height, pixels };
}

/**
 * Paint the grid onto a canvas at one pixel per cell. Returns false when
 * no 2d context is available (e.g. headless test DOMs).
 */
export function drawSpectrogram(
  canvas: HTMLCanvasElement,
  spec: SpectrogramGrid,
): boolean {
  const grid = gridToPixels(spec);
  canvas.width = grid.width;
  canvas.height = grid.height;
  const ctx = canvas.getContext('2d');
  if (!ctx) return false;
  const image = ctx.createImageData(grid.width, grid.height);
  image.data.set(grid.pixels);
  ctx.putImageData(image, 0, 0);
  return true;
}
