// Wire types for the engine's JSON documents. Field names match the server
// responses exactly; nothing here is re-shaped.

export type EdgeDirection = 'a_to_b' | 'b_to_a' | 'bidirectional';
export type ViewLevel = 'system' | 'service';

export interface ControllerDoc {
  key: string;
  members: string[];
  hue: number;
  color: string;
}

export interface NodeDoc {
  id: string;
  kind: string;
  controller: string;
  in_degree: number;
  out_degree: number;
  size: number;
  color: string;
  self_calls: number;
  dimmed: boolean;
  on_path: boolean;
}

export interface EdgeDoc {
  a: string;
  b: string;
  direction: EdgeDirection;
  dependency_count: number;
  cross_lines: number;
}

export interface HighlightDoc {
  path: string;
  nodes: string[];
  edges: Array<{ from: string; to: string }>;
}

export interface LayoutDoc {
  seed: number;
  iterations: number;
  positions: Record<string, [number, number, number]>;
}

export interface ViewDoc {
  level: string;
  system: string;
  controllers: ControllerDoc[];
  nodes: NodeDoc[];
  edges: EdgeDoc[];
  highlight: HighlightDoc | null;
  focus: string | null;
  layout: LayoutDoc | null;
}

export interface FunctionMessageDoc {
  seq: number;
  from: string;
  to: string;
}

export interface FunctionViewDoc {
  service: string;
  participants: string[];
  messages: FunctionMessageDoc[];
}

export interface RankingEntryDoc {
  rank: number;
  score: number;
  key?: string;
  id?: string;
}

export interface RankingDoc {
  metric: string;
  entries: RankingEntryDoc[];
}

export type EventStatus = 'ok' | 'failed' | 'not_reached';
export type SubjectKind = 'node' | 'edge';

export interface SimEventDoc {
  step: number;
  subject_kind: SubjectKind;
  subject: string;
  status: EventStatus;
  detail: string;
}

export interface RunDoc {
  id: string;
  state: string;
  path: string;
  events: SimEventDoc[];
}

export interface SystemInfo {
  system_id: string;
  system_name: string;
  services: number;
}

export interface TraceReport {
  traces: number;
  paths: number;
  malformed_count: number;
}
