/** Panel controller: owns polling, the cooldown ticker, optimistic requests,
 * view events, and the offline rating queue. All service I/O goes through a
 * PanelApi, so a scripted mock drives every state transition in tests. */

import { CooldownError, GateClosedError, NetworkError, type PanelApi } from './api.js';
import {
  initialState,
  requestEnabled,
  tickCooldown,
  withCooldown,
  withListing,
  withLoadFailure,
  withQueuedRating,
  withRating,
  withRatingQueueDrained,
  withRequestSettled,
  withRequestStarted,
  withTestsPassed,
  withViewed,
  type PanelState,
} from './state.js';

export interface PanelOptions {
  studentId: string;
  problemId: string;
  codeText: string;
  pollIntervalMs?: number;
  onRender?: (state: PanelState) => void;
}

export class PanelController {
  state: PanelState;
  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private cooldownTimer: ReturnType<typeof setInterval> | null = null;
  private pollInFlight = false;
  private readonly pollIntervalMs: number;
  private readonly onRender: (state: PanelState) => void;

  constructor(private api: PanelApi, options: PanelOptions) {
    this.state = initialState(options.studentId, options.problemId, options.codeText);
    this.pollIntervalMs = options.pollIntervalMs ?? 5000;
    this.onRender = options.onRender ?? (() => {});
  }

  private update(next: PanelState): void {
    this.state = next;
    this.onRender(next);
  }

  start(): void {
    void this.refresh();
    this.pollTimer = setInterval(() => void this.refresh(), this.pollIntervalMs);
  }

  stop(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
    this.stopCooldownTicker();
  }

  setTestsPassed(passed: boolean): void {
    this.update(withTestsPassed(this.state, passed));
  }

  /** Poll the service: refresh the listing, deliver queued ratings, and fire
   * view events for reports now on screen. Deduplicates in-flight polls. */
  async refresh(): Promise<void> {
    if (this.pollInFlight) {
      return;
    }
    this.pollInFlight = true;
    try {
      const listing = await this.api.getReports();
      this.update(withListing(this.state, listing.reports, listing.nudge,
                              listing.pending_release));
      await this.drainRatingQueue();
      await this.markVisibleReportsViewed();
    } catch (err) {
      if (err instanceof NetworkError) {
        this.update(withLoadFailure(this.state));
      }
    } finally {
      this.pollInFlight = false;
    }
  }

  private async markVisibleReportsViewed(): Promise<void> {
    for (const stored of this.state.reports) {
      if (this.state.viewedReportIds.includes(stored.report_id)) {
        continue;
      }
      try {
        await this.api.recordView(stored.report_id);
        this.update(withViewed(this.state, stored.report_id));
      } catch {
        // leave unviewed; the next poll retries
      }
    }
  }

  async requestFeedback(): Promise<void> {
    if (!requestEnabled(this.state)) {
      return;
    }
    this.update(withRequestStarted(this.state));
    try {
      await this.api.requestFeedback(this.state.codeText, this.state.testsPassed);
      this.update(withRequestSettled(this.state));
      await this.refresh();
    } catch (err) {
      if (err instanceof CooldownError) {
        this.update(withCooldown(withRequestSettled(this.state), err.remainingSeconds));
        this.startCooldownTicker();
      } else if (err instanceof GateClosedError) {
        this.update(withRequestSettled(withTestsPassed(this.state, false)));
      } else if (err instanceof NetworkError) {
        this.update(withLoadFailure(withRequestSettled(
          this.state, 'Request failed; check your connection and try again.')));
      } else {
        this.update(withRequestSettled(this.state, 'Feedback is unavailable right now.'));
      }
    }
  }

  async rate(reportId: string, helpful: boolean): Promise<void> {
    try {
      await this.api.submitRating(reportId, helpful);
      this.update(withRating(this.state, reportId, helpful));
    } catch (err) {
      if (err instanceof NetworkError) {
        // remember the choice and retry on the next poll
        this.update(withQueuedRating(this.state, reportId, helpful));
      }
    }
  }

  private async drainRatingQueue(): Promise<void> {
    if (this.state.pendingRatings.length === 0) {
      return;
    }
    const delivered: string[] = [];
    for (const pending of this.state.pendingRatings) {
      try {
        await this.api.submitRating(pending.reportId, pending.helpful);
        delivered.push(pending.reportId);
      } catch {
        break; // still offline; keep the rest queued
      }
    }
    if (delivered.length > 0) {
      this.update(withRatingQueueDrained(this.state, delivered));
    }
  }

  private startCooldownTicker(): void {
    this.stopCooldownTicker();
    this.cooldownTimer = setInterval(() => {
      this.update(tickCooldown(this.state));
      if (this.state.cooldownRemaining <= 0) {
        this.stopCooldownTicker();
      }
    }, 1000);
  }

  private stopCooldownTicker(): void {
    if (this.cooldownTimer !== null) {
      clearInterval(this.cooldownTimer);
      this.cooldownTimer = null;
    }
  }
}
