import type { EventStatus, SimEventDoc } from './types';

// Simulation playback. The engine streams one event per tick over SSE; the
// scene recolors the event's subject as it arrives. Coloring is a pure fold
// over the events received so far, so replaying a recorded stream always
// reproduces the same scene.

export const STATUS_COLORS: Record<EventStatus, string> = {
  ok: '#2f9e44',
  failed: '#e03131',
  not_reached: '#868e96',
};

// Scene elements are keyed so that an event subject and a view edge resolve
// to the same key. Edges are unordered in the view ("a" < "b"), so the
// directed subject "s4>s1" has to normalize to the same pair as "s1>s4".
export function nodeKey(id: string): string {
  return `node:${id}`;
}

export function edgeKey(from: string, to: string): string {
  return from < to ? `edge:${from}|${to}` : `edge:${to}|${from}`;
}

export function subjectKey(event: SimEventDoc): string {
  if (event.subject_kind === 'edge') {
    const [from, to] = event.subject.split('>');
    return edgeKey(from ?? '', to ?? '');
  }
  return nodeKey(event.subject);
}

export interface SseFrame {
  event: string;
  data: string;
}

// Minimal SSE parser: enough for the engine's "event:" + "data:" frames,
// including multi-line data per the wire format.
export function parseSseStream(text: string): SseFrame[] {
  const frames: SseFrame[] = [];
  let event = 'message';
  let data: string[] = [];
  const flush = () => {
    if (data.length > 0) frames.push({ event, data: data.join('\n') });
    event = 'message';
    data = [];
  };
  for (const rawLine of text.split(/\r?\n/)) {
    if (rawLine === '') {
      flush();
      continue;
    }
    if (rawLine.startsWith(':')) continue;
    const colon = rawLine.indexOf(':');
    const field = colon === -1 ? rawLine : rawLine.slice(0, colon);
    let value = colon === -1 ? '' : rawLine.slice(colon + 1);
    if (value.startsWith(' ')) value = value.slice(1);
    if (field === 'event') event = value;
    else if (field === 'data') data.push(value);
  }
  flush();
  return frames;
}

export function simEventsFromStream(text: string): SimEventDoc[] {
  return parseSseStream(text)
    .filter((frame) => frame.event === 'sim')
    .map((frame) => JSON.parse(frame.data) as SimEventDoc);
}

export function terminalState(text: string): string | null {
  for (const frame of parseSseStream(text)) {
    if (frame.event === 'state') {
      return (JSON.parse(frame.data) as { state: string }).state;
    }
  }
  return null;
}

export class Playback {
  private readonly colors = new Map<string, string>();
  private readonly statuses = new Map<string, EventStatus>();
  readonly events: SimEventDoc[] = [];

  apply(event: SimEventDoc): void {
    this.events.push(event);
    this.colors.set(subjectKey(event), STATUS_COLORS[event.status]);
    this.statuses.set(subjectKey(event), event.status);
  }

  applyAll(events: SimEventDoc[]): void {
    for (const event of events) this.apply(event);
  }

  colorOf(key: string): string | undefined {
    return this.colors.get(key);
  }

  statusOf(key: string): EventStatus | undefined {
    return this.statuses.get(key);
  }

  // Snapshot of every recolored element, for applying to a scene in one pass.
  colorMap(): Map<string, string> {
    return new Map(this.colors);
  }

  countByStatus(status: EventStatus): number {
    let count = 0;
    for (const value of this.statuses.values()) {
      if (value === status) count += 1;
    }
    return count;
  }

  reset(): void {
    this.colors.clear();
    this.statuses.clear();
    this.events.length = 0;
  }
}
