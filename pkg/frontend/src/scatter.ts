/**
 * PCA scatter of the codebook centroids: one SVG circle per phoneme
 * label, noise labels drawn hollow so they stand apart.
 */

import type { PhonemeEntry } from './api.js';
import { labelColor } from './transcript.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

export interface ScatterOptions {
  width?: number;
  height?: number;
  onSelect?: (label: number) => void;
}

/**
 * Render the scatter into an <svg>. Returns the circles in phoneme order
 * (exactly one per entry, so circle count == k for a full catalog).
 */
export function renderScatter(
  svg: SVGSVGElement,
  phonemes: PhonemeEntry[],
  options: ScatterOptions = {},
): SVGCircleElement[] {
  const width = options.width ?? 480;
  const height = options.height ?? 360;
  const pad = 24;
  svg.setAttribute('viewBox', `0 0 ${width} ${height}`);

  let xLo = Infinity;
  let xHi = -Infinity;
  let yLo = Infinity;
  let yHi = -Infinity;
  for (const p of phonemes) {
    if (p.pca[0] < xLo) xLo = p.pca[0];
    if (p.pca[0] > xHi) xHi = p.pca[0];
    if (p.pca[1] < yLo) yLo = p.pca[1];
    if (p.pca[1] > yHi) yHi = p.pca[1];
  }
  const xRange = xHi - xLo > 0 ? xHi - xLo : 1;
  const yRange = yHi - yLo > 0 ? yHi - yLo : 1;

  const circles: SVGCircleElement[] = [];
  for (const p of phonemes) {
    const cx = pad + ((p.pca[0] - xLo) / xRange) * (width - 2 * pad);
    const cy = height - pad - ((p.pca[1] - yLo) / yRange) * (height - 2 * pad);

    const circle = document.createElementNS(SVG_NS, 'circle');
    circle.setAttribute('cx', cx.toFixed(2));
    circle.setAttribute('cy', cy.toFixed(2));
    circle.setAttribute('r', '7');
    circle.setAttribute('class', p.noise ? 'pt noise' : 'pt');
    if (p.noise) {
      circle.setAttribute('fill', 'none');
      circle.setAttribute('stroke', labelColor(p.label));
      circle.setAttribute('stroke-width', '2');
      circle.setAttribute('stroke-dasharray', '3 2');
    } else {
      circle.setAttribute('fill', labelColor(p.label));
    }
    circle.dataset.label = String(p.label);
    if (options.onSelect) {
      const label = p.label;
      circle.addEventListener('click', () => options.onSelect!(label));
    }
    svg.appendChild(circle);
    circles.push(circle);

    const text = document.createElementNS(SVG_NS, 'text');
    text.setAttribute('x', (cx + 9).toFixed(2));
    text.setAttribute('y', (cy + 4).toFixed(2));
    text.setAttribute('class', 'pt-label');
    text.textContent = String(p.label);
    svg.appendChild(text);
  }
  return circles;
}
