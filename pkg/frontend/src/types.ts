/** Wire types shared with the suggestion service. */

export interface CellRecord {
  text: string;
  entity?: string;
}

export interface TableRecord {
  id: string;
  pageTitle?: string;
  caption?: string;
  headings: string[];
  rows: CellRecord[][];
  meta?: Record<string, number>;
}

export interface TcEvidence {
  kind: "tc";
  tableId: string;
  pageTitle: string;
  heading: string;
  rawText: string;
}

export interface KbEvidence {
  kind: "kb";
  predicate: string;
  label: string;
  object: string;
}

export type EvidenceEntry = TcEvidence | KbEvidence;

export interface Suggestion {
  display: string;
  canonical: string;
  score: number;
  rank: number;
  isEmpty: boolean;
  evidence: EvidenceEntry[];
}

export interface SuggestResponse {
  entity: string;
  heading: string;
  method: string;
  k: number;
  suggestions: Suggestion[];
}

export interface SuggestRequest {
  table?: TableRecord;
  entity?: string;
  row?: number;
  heading?: string;
  column?: number;
  k?: number;
  method?: string;
}

export interface HealthResponse {
  status: string;
  artifacts: Record<string, string>;
}
