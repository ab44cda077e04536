import { clampZoom } from './labels';
import { Playback } from './playback';
import type { ViewDoc } from './types';

export type ActiveFilter =
  | { kind: 'node'; id: string }
  | { kind: 'path'; key: string }
  | null;

// Client-side state of the explorer. The engine's view is the source of
// truth; everything here (zoom, selection, drag offsets, playback colors)
// lives and dies in the browser tab.
export class SceneState {
  view: ViewDoc | null = null;
  zoom = 1;
  selected: string | null = null;
  filter: ActiveFilter = null;
  playback: Playback | null = null;

  // Drag moves a node on screen only. Never sent anywhere; cleared whenever
  // a fresh view arrives, so a reload puts every node back where the engine
  // laid it out.
  private readonly overrides = new Map<string, [number, number, number]>();

  setView(view: ViewDoc, filter: ActiveFilter = null): void {
    this.view = view;
    this.filter = filter;
    this.overrides.clear();
    if (this.selected && !view.nodes.some((n) => n.id === this.selected)) {
      this.selected = null;
    }
  }

  setZoom(zoom: number): void {
    this.zoom = clampZoom(zoom);
  }

  select(nodeId: string | null): void {
    this.selected = nodeId;
  }

  dragTo(nodeId: string, position: [number, number, number]): void {
    this.overrides.set(nodeId, position);
  }

  hasOverride(nodeId: string): boolean {
    return this.overrides.has(nodeId);
  }

  positionOf(nodeId: string): [number, number, number] | null {
    const dragged = this.overrides.get(nodeId);
    if (dragged) return dragged;
    const laid = this.view?.layout?.positions[nodeId];
    return laid ? [laid[0], laid[1], laid[2]] : null;
  }

  nodeCount(): number {
    return this.view ? this.view.nodes.length : 0;
  }

  startPlayback(): Playback {
    this.playback = new Playback();
    return this.playback;
  }

  stopPlayback(): void {
    this.playback = null;
  }
}
