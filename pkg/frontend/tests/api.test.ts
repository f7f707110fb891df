import { describe, expect, it } from 'vitest';

import { CooldownError, GateClosedError, HttpPanelApi, NetworkError } from '../src/api.js';

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

function apiWith(handler: (url: string, init?: RequestInit) => Response | Error) {
  const calls: { url: string; init?: RequestInit }[] = [];
  const api = new HttpPanelApi('http://svc', 'alice', 'p1', async (url, init) => {
    calls.push({ url, init });
    const result = handler(url, init);
    if (result instanceof Error) throw result;
    return result;
  });
  return { api, calls };
}

describe('HttpPanelApi', () => {
  it('treats 404 listings as empty (no session yet)', async () => {
    const { api } = apiWith(() => jsonResponse(404, { detail: {} }));
    expect(await api.getReports()).toEqual(
      { reports: [], nudge: false, pending_release: null });
  });

  it('decodes cooldown rejections into CooldownError', async () => {
    const { api } = apiWith(() =>
      jsonResponse(429, { detail: { error: 'cooldown_active', remaining_seconds: 42.5 } }));
    await expect(api.requestFeedback('x = 1\n', true))
      .rejects.toThrowError(CooldownError);
    await api.requestFeedback('x = 1\n', true).catch((err: CooldownError) => {
      expect(err.remainingSeconds).toBe(42.5);
    });
  });

  it('decodes gate rejections into GateClosedError', async () => {
    const { api } = apiWith(() => jsonResponse(403, { detail: { error: 'gate_closed' } }));
    await expect(api.requestFeedback('x = 1\n', false))
      .rejects.toThrowError(GateClosedError);
  });

  it('wraps fetch failures in NetworkError', async () => {
    const { api } = apiWith(() => new TypeError('fetch failed'));
    await expect(api.getReports()).rejects.toThrowError(NetworkError);
  });

  it('hits the documented endpoints with JSON bodies', async () => {
    const { api, calls } = apiWith((url) => {
      if (url.endsWith('/reports')) {
        return jsonResponse(200, { reports: [], nudge: false, pending_release: null });
      }
      return jsonResponse(200, { ok: true });
    });
    await api.getReports();
    await api.recordView('alice/p1/1');
    await api.submitRating('alice/p1/1', true);
    expect(calls.map((c) => c.url)).toEqual([
      'http://svc/sessions/alice/problems/p1/reports',
      'http://svc/reports/alice/p1/1/view',
      'http://svc/reports/alice/p1/1/rating',
    ]);
    expect(JSON.parse(String(calls[2].init?.body))).toEqual({ helpful: true });
  });
});
