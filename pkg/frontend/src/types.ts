/** Canonical report JSON shapes as served by the stylefeed HTTP API. */

export interface ReportItem {
  kind: string;
  line: number | null;
  subject: string | null;
  suggestion: string | null;
  text: string;
}

export interface ReportSection {
  category: string;
  items: ReportItem[];
}

export interface FeedbackReport {
  problem_id: string;
  generated_at: string;
  degraded: boolean;
  sections: ReportSection[];
  // present on the wire but never rendered; the renderer must not read it
  diagnostics?: unknown;
}

export interface StoredReport {
  report_id: string;
  visible_from: string;
  report: FeedbackReport;
}

export interface ReportListing {
  reports: StoredReport[];
  nudge: boolean;
  pending_release: string | null;
}

export interface FeedbackResponse {
  report_id: string;
  visible_from: string;
  visible_now: boolean;
  report: FeedbackReport | null;
}

export const SECTION_ORDER = [
  'IdentifierNames',
  'ConstantsAndMagicNumbers',
  'Comments',
  'Decomposition',
] as const;

export const SECTION_TITLES: Record<string, string> = {
  IdentifierNames: 'Identifier Names',
  ConstantsAndMagicNumbers: 'Constants and Magic Numbers',
  Comments: 'Comments',
  Decomposition: 'Decomposition',
};
