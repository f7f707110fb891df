/** Panel state and its pure transitions. The controller owns timers and I/O;
 * everything here is synchronous and unit-testable. */

import type { StoredReport } from './types.js';

export interface PanelState {
  studentId: string;
  problemId: string;
  codeText: string;
  testsPassed: boolean;
  cooldownRemaining: number; // seconds; 0 means ready
  reports: StoredReport[];
  nudgeActive: boolean;
  pendingRelease: string | null;
  requestInFlight: boolean;
  loadFailed: boolean; // show the retry banner
  ratings: Record<string, boolean>; // reportId -> helpful, as confirmed or queued
  pendingRatings: { reportId: string; helpful: boolean }[]; // offline queue
  viewedReportIds: string[];
  notice: string | null;
}

export function initialState(studentId: string, problemId: string,
                             codeText: string): PanelState {
  return {
    studentId,
    problemId,
    codeText,
    testsPassed: false,
    cooldownRemaining: 0,
    reports: [],
    nudgeActive: false,
    pendingRelease: null,
    requestInFlight: false,
    loadFailed: false,
    ratings: {},
    pendingRatings: [],
    viewedReportIds: [],
    notice: null,
  };
}

/** The request control is enabled only when the gate is open, no cooldown is
 * running, and no request is already in flight. */
export function requestEnabled(state: PanelState): boolean {
  return state.testsPassed && state.cooldownRemaining <= 0 && !state.requestInFlight;
}

export function withListing(state: PanelState, reports: StoredReport[],
                            nudge: boolean, pendingRelease: string | null): PanelState {
  return { ...state, reports, nudgeActive: nudge, pendingRelease, loadFailed: false };
}

export function withLoadFailure(state: PanelState): PanelState {
  return { ...state, loadFailed: true };
}

export function withTestsPassed(state: PanelState, passed: boolean): PanelState {
  return { ...state, testsPassed: passed };
}

export function withRequestStarted(state: PanelState): PanelState {
  return { ...state, requestInFlight: true, notice: null };
}

export function withRequestSettled(state: PanelState, notice: string | null = null): PanelState {
  return { ...state, requestInFlight: false, notice };
}

export function withCooldown(state: PanelState, seconds: number): PanelState {
  return { ...state, cooldownRemaining: Math.max(0, Math.ceil(seconds)) };
}

export function tickCooldown(state: PanelState): PanelState {
  if (state.cooldownRemaining <= 0) {
    return state;
  }
  return { ...state, cooldownRemaining: state.cooldownRemaining - 1 };
}

export function withViewed(state: PanelState, reportId: string): PanelState {
  if (state.viewedReportIds.includes(reportId)) {
    return state;
  }
  return {
    ...state,
    viewedReportIds: [...state.viewedReportIds, reportId],
    nudgeActive: false, // optimistic; the next poll confirms
  };
}

export function withRating(state: PanelState, reportId: string, helpful: boolean): PanelState {
  return { ...state, ratings: { ...state.ratings, [reportId]: helpful } };
}

export function withQueuedRating(state: PanelState, reportId: string,
                                 helpful: boolean): PanelState {
  const queue = state.pendingRatings.filter((r) => r.reportId !== reportId);
  return {
    ...state,
    ratings: { ...state.ratings, [reportId]: helpful },
    pendingRatings: [...queue, { reportId, helpful }],
  };
}

export function withRatingQueueDrained(state: PanelState,
                                       delivered: string[]): PanelState {
  return {
    ...state,
    pendingRatings: state.pendingRatings.filter((r) => !delivered.includes(r.reportId)),
  };
}
