/**
 * Vocabulary table. The service already sorts words longest-order first
 * and by popularity score within an order; rows are rendered in payload
 * order and never re-sorted client-side.
 */

import type { VocabularyWord } from './api.js';

/**
 * True when the list is ordered by descending n-gram length, and by
 * descending popularity score within each length.
 */
export function isSortedByOrderThenPs(words: VocabularyWord[]): boolean {
  for (let i = 1; i < words.length; i++) {
    const a = words[i - 1];
    const b = words[i];
    if (b.ngram.length > a.ngram.length) return false;
    if (b.ngram.length === a.ngram.length && b.ps > a.ps) return false;
  }
  return true;
}

export interface VocabularyOptions {
  onPlay?: (wordId: number) => void;
}

/**
 * Append one row per word to a <tbody>: rank, the n-gram, its order,
 * count, f, delta, ps, and a play button carrying the word id.
 */
export function renderVocabulary(
  tbody: HTMLTableSectionElement,
  words: VocabularyWord[],
  options: VocabularyOptions = {},
): HTMLTableRowElement[] {
  const rows: HTMLTableRowElement[] = [];
  words.forEach((word, i) => {
    const tr = document.createElement('tr');
    tr.dataset.wordId = String(word.id);

    const cells = [
      String(i + 1),
      word.ngram.join('·'),
      String(word.ngram.length),
      String(word.count),
      word.f.toFixed(4),
      String(word.delta),
      word.ps.toFixed(4),
    ];
    for (const text of cells) {
      const td = document.createElement('td');
      td.textContent = text;
      tr.appendChild(td);
    }

    const td = document.createElement('td');
    const button = document.createElement('button');
    button.className = 'play-word';
    button.textContent = '▶';
    button.dataset.wordId = String(word.id);
    if (options.onPlay) {
      button.addEventListener('click', () => options.onPlay!(word.id));
    }
    td.appendChild(button);
    tr.appendChild(td);

    tbody.appendChild(tr);
    rows.push(tr);
  });
  return rows;
}
