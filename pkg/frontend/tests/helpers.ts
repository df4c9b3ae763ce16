/**
 * Shared test plumbing: frozen service fixtures and a fetch stand-in
 * that serves them, so app flows run against real captured payloads
 * without a live service.
 */

import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

const FIXTURE_DIR = join(dirname(fileURLToPath(import.meta.url)), 'fixtures');

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURE_DIR, name), 'utf8')) as T;
}

export function fixtureBytes(name: string): Uint8Array {
  return new Uint8Array(readFileSync(join(FIXTURE_DIR, name)));
}

function fakeResponse(status: number, body: unknown): Response {
  const bytes = body instanceof Uint8Array ? body : null;
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: String(status),
    json: async () => {
      if (bytes) throw new Error('binary body');
      return body;
    },
    arrayBuffer: async () => (bytes ? bytes.buffer : new ArrayBuffer(0)),
  } as unknown as Response;
}

export interface ServiceMock {
  /** "METHOD url" strings in request order. */
  calls: string[];
  /** When true every request rejects as if the service were down. */
  down: boolean;
  restore: () => void;
}

/**
 * Replace global fetch with a router over the frozen fixtures. Unknown
 * API paths get a 404 with an Error-shaped body, like the real service.
 */
export function installServiceFetch(): ServiceMock {
  const original = globalThis.fetch;
  const mock: ServiceMock = {
    calls: [],
    down: false,
    restore: () => {
      globalThis.fetch = original;
    },
  };

  globalThis.fetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = init?.method ?? 'GET';
    mock.calls.push(`${method} ${url}`);
    if (mock.down) throw new TypeError('fetch failed');

    if (method === 'POST' && url === '/api/transcribe') {
      return fakeResponse(200, fixture('annotated.json'));
    }
    if (url === '/api/health') return fakeResponse(200, fixture('health.json'));
    if (url === '/api/vocabulary') {
      return fakeResponse(200, fixture('vocabulary.json'));
    }
    if (url === '/api/phonemes') {
      return fakeResponse(200, fixture('phonemes.json'));
    }
    if (/^\/api\/phonemes\/\d+\/exemplars$/.test(url)) {
      return fakeResponse(200, fixture('exemplars.json'));
    }
    if (url.startsWith('/api/samples?')) {
      return fakeResponse(200, fixture('samples.json'));
    }
    if (url.endsWith('/audio')) {
      return fakeResponse(200, fixtureBytes('upload.wav'));
    }
    return fakeResponse(404, { detail: `no route for ${url}` });
  }) as typeof fetch;

  return mock;
}

/** Uploadable File built from the frozen WAV the fixtures were made with. */
export function uploadFile(): File {
  return new File([fixtureBytes('upload.wav')], 'upload.wav', {
    type: 'audio/wav',
  });
}

/** Point a file input at `file` and fire its change event. */
export function chooseFile(input: HTMLInputElement, file: File): void {
  Object.defineProperty(input, 'files', {
    value: [file],
    configurable: true,
  });
  input.dispatchEvent(new Event('change'));
}
