// Event-sourced client state: the rendered tree is a pure function of the
// event-log prefix, so a refresh that replays the log reproduces the exact
// same view. No client-only text mutations.

import type { AnswerUnit, EventKind, LinkEdge, NodeKind, NodeStatus, SessionEvent } from './types';

export interface ViewNode {
  id: number;
  parentId: number | null;
  kind: NodeKind;
  text: string;
  status: NodeStatus;
  provenance: string;
  feedbackAnswer: string | null;
  collapsed: boolean;
  children: number[];
}

export interface ViewState {
  nodes: Record<number, ViewNode>;
  roots: number[];
  pendingFeedback: number | null;
  paused: boolean;
  treeComplete: boolean;
  answering: boolean;
  answer: string;
  answerFinal: boolean;
  units: AnswerUnit[];
  links: LinkEdge[];
  linksAvailable: boolean | null;
  displayThreshold: number;
  errors: string[];
  lastSeq: number;
}

export const initialState: ViewState = {
  nodes: {},
  roots: [],
  pendingFeedback: null,
  paused: false,
  treeComplete: false,
  answering: false,
  answer: '',
  answerFinal: false,
  units: [],
  links: [],
  linksAvailable: null,
  displayThreshold: 0.5,
  errors: [],
  lastSeq: -1,
};

function insertChild(list: number[], index: number, id: number): number[] {
  const next = list.slice();
  next.splice(Math.min(Math.max(index, 0), next.length), 0, id);
  return next;
}

export function subtreeIds(state: ViewState, id: number): number[] {
  const node = state.nodes[id];
  if (!node) return [];
  return [id, ...node.children.flatMap((child) => subtreeIds(state, child))];
}

export function preorder(state: ViewState): number[] {
  return state.roots.flatMap((root) => subtreeIds(state, root));
}

export function applyEvent(state: ViewState, event: SessionEvent): ViewState {
  if (event.seq <= state.lastSeq) return state; // replayed duplicate
  const next: ViewState = { ...state, nodes: { ...state.nodes }, lastSeq: event.seq };
  const p = event.payload as Record<string, any>;
  switch (event.kind as EventKind) {
    case 'node_added': {
      const node: ViewNode = {
        id: p.node_id,
        parentId: p.parent_id ?? null,
        kind: p.kind,
        text: p.text ?? '',
        status: p.status ?? 'generating',
        provenance: p.provenance ?? 'model_emitted',
        feedbackAnswer: null,
        collapsed: false,
        children: [],
      };
      next.nodes[node.id] = node;
      if (node.parentId === null) {
        next.roots = insertChild(next.roots, p.index ?? next.roots.length, node.id);
      } else if (next.nodes[node.parentId]) {
        const parent = next.nodes[node.parentId];
        next.nodes[parent.id] = {
          ...parent,
          children: insertChild(parent.children, p.index ?? parent.children.length, node.id),
        };
      }
      return next;
    }
    case 'node_text_delta': {
      const node = next.nodes[p.node_id];
      if (node) next.nodes[node.id] = { ...node, text: node.text + p.delta };
      return next;
    }
    case 'node_completed': {
      const node = next.nodes[p.node_id];
      if (node) {
        next.nodes[node.id] = {
          ...node,
          status: p.status ?? 'complete',
          text: node.text.replace(/\s+/g, ' ').trim(),
        };
      }
      return next;
    }
    case 'feedback_required':
      next.pendingFeedback = p.node_id;
      return next;
    case 'node_updated': {
      const node = next.nodes[p.node_id];
      if (node) {
        next.nodes[node.id] = {
          ...node,
          kind: p.kind ?? node.kind,
          text: p.text ?? node.text,
          status: p.status ?? node.status,
          provenance: p.provenance ?? node.provenance,
          feedbackAnswer:
            'feedback_answer' in p ? (p.feedback_answer ?? null) : node.feedbackAnswer,
          collapsed: p.collapsed ?? node.collapsed,
        };
        if (next.pendingFeedback === node.id && p.status !== 'awaiting_feedback') {
          next.pendingFeedback = null;
        }
      }
      return next;
    }
    case 'node_removed': {
      const removed = subtreeIds(next, p.node_id);
      const target = next.nodes[p.node_id];
      if (!target) return next;
      if (target.parentId === null) {
        next.roots = next.roots.filter((id) => id !== target.id);
      } else if (next.nodes[target.parentId]) {
        const parent = next.nodes[target.parentId];
        next.nodes[parent.id] = {
          ...parent,
          children: parent.children.filter((id) => id !== target.id),
        };
      }
      for (const id of removed) delete next.nodes[id];
      if (next.pendingFeedback !== null && removed.includes(next.pendingFeedback)) {
        next.pendingFeedback = null;
      }
      return next;
    }
    case 'generation_paused':
      next.paused = true;
      return next;
    case 'generation_resumed':
      next.paused = false;
      if (next.pendingFeedback !== null && p.node_id === next.pendingFeedback) {
        next.pendingFeedback = null;
      }
      return next;
    case 'tree_complete':
      next.treeComplete = true;
      return next;
    case 'answer_delta': {
      if (next.answerFinal) {
        // a re-invocation replaces the previous answer and its links
        next.answer = '';
        next.answerFinal = false;
        next.units = [];
        next.links = [];
        next.linksAvailable = null;
      }
      next.answering = true;
      next.answer += p.delta;
      return next;
    }
    case 'answer_complete':
      next.answering = false;
      next.answer = p.answer ?? next.answer;
      next.units = (p.units ?? []) as AnswerUnit[];
      next.answerFinal = true;
      return next;
    case 'links_ready':
      next.links = (p.edges ?? []) as LinkEdge[];
      next.linksAvailable = true;
      if (typeof p.display_threshold === 'number') next.displayThreshold = p.display_threshold;
      return next;
    case 'links_unavailable':
      next.links = [];
      next.linksAvailable = false;
      return next;
    case 'error':
      next.errors = [...next.errors, p.message ?? 'unknown error'];
      return next;
    default:
      return next;
  }
}

export function applyEvents(state: ViewState, events: SessionEvent[]): ViewState {
  return events.reduce(applyEvent, state);
}

export function linkedPremises(state: ViewState, unitId: number, threshold: number): number[] {
  return state.links
    .filter((e) => e.hypothesis_id === unitId && e.strength >= threshold)
    .map((e) => e.premise_id);
}

export function linkedUnits(state: ViewState, nodeId: number, threshold: number): number[] {
  return state.links
    .filter((e) => e.premise_id === nodeId && e.strength >= threshold)
    .map((e) => e.hypothesis_id);
}

export function awaitingFeedbackIds(state: ViewState): number[] {
  return Object.values(state.nodes)
    .filter((n) => n.status === 'awaiting_feedback')
    .map((n) => n.id);
}
