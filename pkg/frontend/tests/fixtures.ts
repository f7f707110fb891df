/** Shared fixtures: a diagnostics-bearing report as the service would send it. */

import type { FeedbackReport, ReportListing, StoredReport } from '../src/types.js';

export function fixtureReport(overrides: Partial<FeedbackReport> = {}): FeedbackReport {
  return {
    problem_id: 'mars_weight.py',
    generated_at: '2026-01-05T12:00:00+00:00',
    degraded: false,
    sections: [
      {
        category: 'IdentifierNames',
        items: [
          {
            kind: 'rename',
            line: 4,
            subject: 'weight_str',
            suggestion: 'weight_float',
            text: "The name 'weight_str' could be clearer. Consider 'weight_float'.",
          },
        ],
      },
      {
        category: 'ConstantsAndMagicNumbers',
        items: [
          {
            kind: 'magic_number',
            line: 6,
            subject: '0.378',
            suggestion: 'Define an uppercase constant for 0.378.',
            text: 'The number 0.378 appears directly in the code without a name.',
          },
        ],
      },
      {
        category: 'Comments',
        items: [
          { kind: 'praise', line: 2, subject: null, suggestion: null,
            text: 'Nice work using a comment on line 2 to explain that step.' },
        ],
      },
      {
        category: 'Decomposition',
        items: [
          { kind: 'all_clear', line: null, subject: null, suggestion: null,
            text: 'Your functions are a manageable size. Nothing to split.' },
        ],
      },
    ],
    // hidden fields: must never surface in rendered markup
    diagnostics: {
      identifier_items: [
        { name: 'weight_str', line: 4, score: 9871, misleading_type: true,
          suggested_name: 'weight_float', explanation: 'DIAGNOSTIC_SENTINEL_TEXT' },
      ],
      dropped_identifier_items: [],
      attempt_counts: { identifiers: 1, comments: 1 },
    },
    ...overrides,
  };
}

export function emptyReport(): FeedbackReport {
  const report = fixtureReport();
  report.sections = report.sections.map((section) => ({
    category: section.category,
    items: [{ kind: 'all_clear', line: null, subject: null, suggestion: null,
              text: `Nothing to flag for ${section.category}.` }],
  }));
  return report;
}

export function storedReport(id = 'alice/p1/1',
                             report: FeedbackReport = fixtureReport()): StoredReport {
  return { report_id: id, visible_from: '2026-01-07T10:00:00+00:00', report };
}

export function listing(overrides: Partial<ReportListing> = {}): ReportListing {
  return { reports: [], nudge: false, pending_release: null, ...overrides };
}
