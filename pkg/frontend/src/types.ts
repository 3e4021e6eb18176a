// Shapes of the service's JSON payloads.

export type Phase = 'Unlinked' | 'Linked' | 'CoarseSelected' | 'Revised' | 'Labeled';

export interface OfferedType {
  path: string;
  definition: string;
}

export interface CandidateView {
  entity: string;
  score: number;
  name: string;
  description: string;
}

export interface MentionView {
  mention_id: string;
  start: number;
  end: number;
  surface: string;
  phase: Phase;
  selected_types: string[];
  final_label: string | null;
  final_entity: string | null;
  predicted: string | null;
  candidates: CandidateView[];
  offered_types: OfferedType[];
}

export interface SessionView {
  session_id: string;
  annotator: string;
  doc_id: string;
  text: string;
  undo_depth: number;
  redo_depth: number;
  mentions: MentionView[];
}

export interface DocSummary {
  doc_id: string;
  mention_count: number;
}

export interface MatrixResponse {
  annotators: string[];
  cells: (number | null)[][];
}

export interface ErrorCountsResponse {
  counts: Record<string, number>;
}

export interface IntegrationResponse {
  labels: Record<string, string>;
  unresolved: string[];
  support: Record<string, number>;
}

export interface ReductionReport {
  total_types: number;
  mean_kc_types: number;
  ratio: number;
}
