/** Pure rendering: PanelState -> HTML string. Only whitelisted report fields
 * (kind, line, subject, suggestion, text) ever reach the markup; diagnostics
 * are invisible to this module by construction. */

import { requestEnabled, type PanelState } from './state.js';
import { SECTION_ORDER, SECTION_TITLES, type FeedbackReport, type StoredReport } from './types.js';

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

function renderCode(codeText: string): string {
  const lines = codeText.replace(/\n$/, '').split('\n');
  const rows = lines
    .map((line, index) =>
      `<tr><td class="line-no">${index + 1}</td>` +
      `<td class="line-text">${escapeHtml(line)}</td></tr>`)
    .join('');
  return `<table class="code" aria-label="your program">${rows}</table>`;
}

function renderItemText(text: string, line: number | null): string {
  const prefix = line === null ? '' : `<span class="line-ref">line ${line}:</span> `;
  return `${prefix}${escapeHtml(text)}`;
}

function renderReport(report: FeedbackReport): string {
  const byCategory = new Map(report.sections.map((s) => [s.category, s]));
  const sections = SECTION_ORDER.map((category) => {
    const section = byCategory.get(category);
    const items = (section?.items ?? [])
      .map((item) => `<li class="item item-${escapeHtml(item.kind)}">` +
        `${renderItemText(item.text, item.line)}</li>`)
      .join('');
    return (
      `<section class="feedback-section" data-category="${category}">` +
      `<h3>${SECTION_TITLES[category] ?? category}</h3>` +
      `<ul>${items}</ul></section>`
    );
  }).join('');
  const degraded = report.degraded
    ? '<p class="degraded-note">Some automated feedback was unavailable for this report.</p>'
    : '';
  return degraded + sections;
}

function renderRatingControls(stored: StoredReport, state: PanelState): string {
  const current = state.ratings[stored.report_id];
  const pressed = (value: boolean) => (current === value ? ' aria-pressed="true"' : '');
  const queued = state.pendingRatings.some((r) => r.reportId === stored.report_id)
    ? '<span class="rating-queued">(will send when back online)</span>'
    : '';
  return (
    `<div class="rating" data-report="${escapeHtml(stored.report_id)}">` +
    `Was this helpful? ` +
    `<button class="rate-helpful"${pressed(true)}>Yes</button>` +
    `<button class="rate-unhelpful"${pressed(false)}>No</button>${queued}</div>`
  );
}

function renderStoredReport(stored: StoredReport, state: PanelState): string {
  return (
    `<article class="report" data-report-id="${escapeHtml(stored.report_id)}">` +
    `<header>Feedback from ${escapeHtml(stored.visible_from)}</header>` +
    renderReport(stored.report) +
    renderRatingControls(stored, state) +
    `</article>`
  );
}

function renderRequestControl(state: PanelState): string {
  const enabled = requestEnabled(state);
  const pieces: string[] = [];
  if (!state.testsPassed) {
    pieces.push('<span class="gate-tooltip">Pass all functionality tests to unlock style feedback.</span>');
  } else if (state.cooldownRemaining > 0) {
    pieces.push(`<span class="cooldown" data-remaining="${state.cooldownRemaining}">` +
      `Next request available in ${state.cooldownRemaining} s</span>`);
  }
  if (state.requestInFlight) {
    pieces.push('<span class="spinner" role="status">Generating feedback…</span>');
  }
  return (
    `<div class="request-control">` +
    `<button class="request-feedback"${enabled ? '' : ' disabled'}>` +
    `Request style feedback</button>${pieces.join('')}</div>`
  );
}

export function renderPanel(state: PanelState): string {
  const banners: string[] = [];
  if (state.loadFailed) {
    banners.push('<div class="banner banner-error">Could not reach the feedback service. ' +
      '<button class="retry-load">Retry</button></div>');
  }
  if (state.nudgeActive) {
    banners.push('<div class="banner banner-nudge">New style feedback is ready for you. ' +
      'Take a look below!</div>');
  }
  if (state.pendingRelease !== null && state.reports.length === 0) {
    banners.push(`<div class="banner banner-pending">Your style feedback will be released on ` +
      `${escapeHtml(formatRelease(state.pendingRelease))}.</div>`);
  }
  if (state.notice) {
    banners.push(`<div class="banner banner-notice">${escapeHtml(state.notice)}</div>`);
  }
  const reports = state.reports.map((stored) => renderStoredReport(stored, state)).join('');
  return (
    `<div class="panel">${banners.join('')}` +
    renderCode(state.codeText) +
    renderRequestControl(state) +
    `<div class="reports">${reports}</div></div>`
  );
}

function formatRelease(iso: string): string {
  const date = new Date(iso);
  if (Number.isNaN(date.getTime())) {
    return iso;
  }
  const weekday = ['Sunday', 'Monday', 'Tuesday', 'Wednesday', 'Thursday',
                   'Friday', 'Saturday'][date.getUTCDay()];
  return `${weekday} ${date.toISOString().slice(0, 16).replace('T', ' ')} UTC`;
}
