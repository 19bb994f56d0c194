// Wire types mirroring the service payloads.

export type NodeKind = 'topic' | 'branch' | 'feedback' | 'summary';

export type NodeStatus =
  | 'generating'
  | 'complete'
  | 'awaiting_feedback'
  | 'answered'
  | 'skipped'
  | 'collapsed';

export type EventKind =
  | 'node_added'
  | 'node_text_delta'
  | 'node_completed'
  | 'feedback_required'
  | 'node_updated'
  | 'node_removed'
  | 'generation_paused'
  | 'generation_resumed'
  | 'tree_complete'
  | 'answer_delta'
  | 'answer_complete'
  | 'links_ready'
  | 'links_unavailable'
  | 'error';

export interface SessionEvent {
  seq: number;
  kind: EventKind;
  payload: Record<string, unknown>;
}

export interface LinkEdge {
  hypothesis_id: number;
  premise_id: number;
  strength: number;
}

export type AnswerUnit = [number, string];
