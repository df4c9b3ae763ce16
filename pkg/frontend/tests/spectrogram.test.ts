import { describe, expect, it } from 'vitest';

import {
  COLOR_STOPS,
  colormap,
  decodeF32,
  gridToPixels,
} from '../src/spectrogram.js';
import type { AnnotatedTranscript } from '../src/api.js';
import { fixture } from './helpers.js';

/** Base64 of explicit little-endian float32s, independent of host order. */
function b64(values: number[]): string {
  const bytes = new Uint8Array(values.length * 4);
  const view = new DataView(bytes.buffer);
  values.forEach((v, i) => view.setFloat32(i * 4, v, true));
  return Buffer.from(bytes).toString('base64');
}

describe('decodeF32', () => {
  it('round-trips float32 values exactly', () => {
    const values = [0, 1, -2.5, 3.25, 1e-8, -65504, 123456.78125];
    const out = decodeF32(b64(values));
    expect(out.length).toBe(values.length);
    values.forEach((v, i) => expect(out[i]).toBe(Math.fround(v)));
  });

  it('reads little-endian byte order explicitly', () => {
    // 0x3f800000 little-endian = [00 00 80 3f] = 1.0
    const base64 = Buffer.from(new Uint8Array([0, 0, 0x80, 0x3f])).toString('base64');
    expect(decodeF32(base64)[0]).toBe(1.0);
  });

  it('decodes the frozen service payload to the advertised grid size', () => {
    const annotated = fixture<AnnotatedTranscript>('annotated.json');
    const grid = annotated.spectrogram;
    const values = decodeF32(grid.data);
    expect(values.length).toBe(grid.n_frames * grid.n_bins);
    expect([...values].every((v) => Number.isFinite(v))).toBe(true);
  });
});

describe('colormap', () => {
  it('hits the fixed stops exactly', () => {
    for (const [t, r, g, b] of COLOR_STOPS) {
      expect(colormap(t)).toEqual([r, g, b]);
    }
  });

  it('clamps outside [0, 1]', () => {
    expect(colormap(-5)).toEqual(colormap(0));
    expect(colormap(7)).toEqual(colormap(1));
  });

  it('interpolates linearly between stops', () => {
    const [t0, r0] = COLOR_STOPS[0];
    const [t1, r1] = COLOR_STOPS[1];
    const mid = (t0 + t1) / 2;
    expect(colormap(mid)[0]).toBe(Math.round((r0 + r1) / 2));
  });
});

describe('gridToPixels', () => {
  it('produces one RGBA pixel per cell with bin 0 at the bottom row', () => {
    // 2 frames x 2 bins, row-major per frame: [f0b0, f0b1, f1b0, f1b1]
    const spec = { n_frames: 2, n_bins: 2, data: b64([0, 1, 0.5, 0]) };
    const grid = gridToPixels(spec);
    expect(grid.width).toBe(2);
    expect(grid.height).toBe(2);
    expect(grid.pixels.length).toBe(2 * 2 * 4);

    const px = (x: number, y: number) => {
      const o = (y * grid.width + x) * 4;
      return [...grid.pixels.slice(o, o + 4)];
    };
    // frame 0, bin 0 (min value) -> bottom-left, first color stop, opaque
    expect(px(0, 1)).toEqual([...colormap(0), 255]);
    // frame 0, bin 1 (max value) -> top-left, last color stop
    expect(px(0, 0)).toEqual([...colormap(1), 255]);
    // frame 1, bin 0 (midpoint) -> bottom-right
    expect(px(1, 1)).toEqual([...colormap(0.5), 255]);
  });

  it('flattens a constant grid to the low end of the ramp', () => {
    const spec = { n_frames: 1, n_bins: 2, data: b64([4, 4]) };
    const grid = gridToPixels(spec);
    expect([...grid.pixels.slice(0, 3)]).toEqual(colormap(0));
  });

  it('rejects a payload whose length disagrees with the header', () => {
    const spec = { n_frames: 3, n_bins: 2, data: b64([1, 2, 3]) };
    expect(() => gridToPixels(spec)).toThrow(/expected 6/);
  });
});
