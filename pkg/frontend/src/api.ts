/** Typed client for the stylefeed session API. All failures surface as typed
 * errors so the panel can distinguish cooldowns from outages. */

import type { FeedbackResponse, ReportListing } from './types.js';

export class NetworkError extends Error {}

export class GateClosedError extends Error {
  constructor() {
    super('pass all functionality tests first');
  }
}

export class CooldownError extends Error {
  constructor(public remainingSeconds: number) {
    super(`feedback available again in ${Math.ceil(remainingSeconds)} s`);
  }
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export interface PanelApi {
  getReports(): Promise<ReportListing>;
  requestFeedback(source: string, testsPassed: boolean): Promise<FeedbackResponse>;
  recordView(reportId: string): Promise<void>;
  submitRating(reportId: string, helpful: boolean): Promise<void>;
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class HttpPanelApi implements PanelApi {
  constructor(
    private baseUrl: string,
    private studentId: string,
    private problemId: string,
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async call(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new NetworkError(String(err));
    }
    return response;
  }

  private sessionPath(tail: string): string {
    const sid = encodeURIComponent(this.studentId);
    const pid = encodeURIComponent(this.problemId);
    return `/sessions/${sid}/problems/${pid}/${tail}`;
  }

  async getReports(): Promise<ReportListing> {
    const response = await this.call(this.sessionPath('reports'));
    if (response.status === 404) {
      // no session yet: same as an empty listing for the panel
      return { reports: [], nudge: false, pending_release: null };
    }
    if (!response.ok) {
      throw new ApiError(response.status, await response.text());
    }
    return (await response.json()) as ReportListing;
  }

  async requestFeedback(source: string, testsPassed: boolean): Promise<FeedbackResponse> {
    const response = await this.call(this.sessionPath('feedback'), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ source, tests_passed: testsPassed }),
    });
    if (response.status === 403) {
      throw new GateClosedError();
    }
    if (response.status === 429) {
      const body = await response.json();
      throw new CooldownError(body.detail?.remaining_seconds ?? 0);
    }
    if (!response.ok) {
      throw new ApiError(response.status, await response.text());
    }
    return (await response.json()) as FeedbackResponse;
  }

  async recordView(reportId: string): Promise<void> {
    const response = await this.call(`/reports/${reportId}/view`, { method: 'POST' });
    if (!response.ok && response.status !== 403) {
      throw new ApiError(response.status, await response.text());
    }
  }

  async submitRating(reportId: string, helpful: boolean): Promise<void> {
    const response = await this.call(`/reports/${reportId}/rating`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ helpful }),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await response.text());
    }
  }
}
