import { describe, expect, it, vi } from 'vitest';

import type { PhonemeEntry, PhonemeList } from '../src/api.js';
import { renderScatter } from '../src/scatter.js';
import { fixture } from './helpers.js';

function entry(label: number, pca: number[], noise = false): PhonemeEntry {
  return { label, noise, pca, stats: null, n_exemplars: 0 };
}

function svgHost(): SVGSVGElement {
  return document.createElementNS('http://www.w3.org/2000/svg', 'svg');
}

describe('renderScatter', () => {
  it('draws one circle per phoneme', () => {
    const svg = svgHost();
    const circles = renderScatter(svg, [
      entry(0, [0, 0]),
      entry(1, [1, 2]),
      entry(2, [-1, 3]),
    ]);
    expect(circles.length).toBe(3);
    expect(svg.querySelectorAll('circle').length).toBe(3);
  });

  it('draws the full frozen catalog: exactly k points', () => {
    const catalog = fixture<PhonemeList>('phonemes.json');
    const svg = svgHost();
    const circles = renderScatter(svg, catalog.phonemes);
    expect(circles.length).toBe(catalog.k);
  });

  it('styles noise labels hollow and distinct', () => {
    const svg = svgHost();
    const [clean, noisy] = renderScatter(svg, [
      entry(0, [0, 0]),
      entry(1, [1, 1], true),
    ]);
    expect(noisy.classList.contains('noise')).toBe(true);
    expect(noisy.getAttribute('fill')).toBe('none');
    expect(noisy.getAttribute('stroke-dasharray')).not.toBeNull();
    expect(clean.classList.contains('noise')).toBe(false);
    expect(clean.getAttribute('fill')).not.toBe('none');
  });

  it('keeps points inside the viewBox and preserves orientation', () => {
    const svg = svgHost();
    const circles = renderScatter(
      svg,
      [entry(0, [-5, -5]), entry(1, [5, 5]), entry(2, [0, 0])],
      { width: 100, height: 100 },
    );
    for (const c of circles) {
      const cx = Number(c.getAttribute('cx'));
      const cy = Number(c.getAttribute('cy'));
      expect(cx).toBeGreaterThanOrEqual(0);
      expect(cx).toBeLessThanOrEqual(100);
      expect(cy).toBeGreaterThanOrEqual(0);
      expect(cy).toBeLessThanOrEqual(100);
    }
    // larger pca y must sit higher on screen (smaller cy)
    const yLow = Number(circles[0].getAttribute('cy'));
    const yHigh = Number(circles[1].getAttribute('cy'));
    expect(yHigh).toBeLessThan(yLow);
  });

  it('reports clicks through onSelect', () => {
    const svg = svgHost();
    const onSelect = vi.fn();
    const circles = renderScatter(svg, [entry(4, [0, 0]), entry(9, [1, 1])], {
      onSelect,
    });
    circles[1].dispatchEvent(new Event('click'));
    expect(onSelect).toHaveBeenCalledWith(9);
  });
});
