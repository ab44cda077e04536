import * as THREE from 'three';
import { labelText } from './labels';
import { edgeKey, nodeKey } from './playback';
import type { EdgeDoc, NodeDoc, ViewDoc } from './types';

// ----- Constants -----

const WORLD_SCALE = 60;

// Box edge length grows with log(1 + size) so the hub nodes stand out
// without dwarfing everything else.
const NODE_BASE = 1.2;
const NODE_LOG_FACTOR = 0.75;

const EDGE_COLOR = '#74c0fc';
const EDGE_HIGHLIGHT_COLOR = '#fcc419';
const DIMMED_OPACITY = 0.18;
const ARROW_LENGTH = 1.6;
const ARROW_RADIUS = 0.55;
const TICK_HALF_LENGTH = 1.1;
const TICK_SPACING = 0.05;
const SELF_LOOP_COLOR = '#ffd43b';

// ----- Scene structure -----

export interface SceneElements {
  group: THREE.Group;
  nodes: Map<string, THREE.Mesh>;
  edges: Map<string, THREE.Group>;
  labels: Map<string, THREE.Sprite>;
  baseColors: Map<string, string>;
}

export class MalformedView extends Error {}

export function nodeScale(size: number): number {
  return NODE_BASE + NODE_LOG_FACTOR * Math.log1p(Math.max(0, size));
}

function checkView(view: ViewDoc): void {
  if (!Array.isArray(view.nodes) || !Array.isArray(view.edges)) {
    throw new MalformedView('view payload is missing nodes or edges');
  }
  for (const node of view.nodes) {
    if (typeof node.id !== 'string' || typeof node.size !== 'number') {
      throw new MalformedView('node entry is missing id or size');
    }
  }
  for (const edge of view.edges) {
    if (typeof edge.a !== 'string' || typeof edge.b !== 'string') {
      throw new MalformedView('edge entry is missing endpoints');
    }
  }
}

function positionFor(
  view: ViewDoc,
  id: string,
  index: number,
  total: number,
): THREE.Vector3 {
  const laid = view.layout?.positions[id];
  if (laid) {
    return new THREE.Vector3(laid[0], laid[1], laid[2]).multiplyScalar(WORLD_SCALE);
  }
  // No layout in the payload: fall back to a flat ring.
  const angle = (index / Math.max(1, total)) * Math.PI * 2;
  return new THREE.Vector3(
    Math.cos(angle) * WORLD_SCALE * 0.6,
    0,
    Math.sin(angle) * WORLD_SCALE * 0.6,
  );
}

// ----- Nodes -----

function buildNode(node: NodeDoc, position: THREE.Vector3): THREE.Mesh {
  const geometry = new THREE.BoxGeometry(1, 1, 1);
  const material = new THREE.MeshLambertMaterial({ color: new THREE.Color(node.color) });
  if (node.dimmed) {
    material.transparent = true;
    material.opacity = DIMMED_OPACITY;
  }
  const mesh = new THREE.Mesh(geometry, material);
  mesh.scale.setScalar(nodeScale(node.size));
  mesh.position.copy(position);
  mesh.userData = { kind: 'node', id: node.id, doc: node };
  return mesh;
}

function buildSelfLoop(mesh: THREE.Mesh): THREE.Mesh {
  const radius = mesh.scale.x * 0.45;
  const geometry = new THREE.TorusGeometry(radius, radius * 0.12, 8, 24);
  const material = new THREE.MeshBasicMaterial({ color: new THREE.Color(SELF_LOOP_COLOR) });
  const loop = new THREE.Mesh(geometry, material);
  loop.position.set(0, 0.75, 0);
  loop.rotation.x = Math.PI / 2;
  loop.userData = { role: 'self-loop' };
  return loop;
}

// ----- Edges -----

function buildArrowhead(
  tip: THREE.Vector3,
  direction: THREE.Vector3,
  color: THREE.Color,
  dimmed: boolean,
): THREE.Mesh {
  const geometry = new THREE.ConeGeometry(ARROW_RADIUS, ARROW_LENGTH, 10);
  const material = new THREE.MeshBasicMaterial({ color });
  if (dimmed) {
    material.transparent = true;
    material.opacity = DIMMED_OPACITY;
  }
  const cone = new THREE.Mesh(geometry, material);
  cone.position.copy(tip);
  cone.quaternion.setFromUnitVectors(new THREE.Vector3(0, 1, 0), direction);
  cone.userData = { role: 'arrowhead' };
  return cone;
}

function buildTick(
  center: THREE.Vector3,
  across: THREE.Vector3,
  color: THREE.Color,
): THREE.Line {
  const geometry = new THREE.BufferGeometry().setFromPoints([
    center.clone().addScaledVector(across, -TICK_HALF_LENGTH),
    center.clone().addScaledVector(across, TICK_HALF_LENGTH),
  ]);
  const line = new THREE.Line(geometry, new THREE.LineBasicMaterial({ color }));
  line.userData = { role: 'tick' };
  return line;
}

function buildEdge(
  edge: EdgeDoc,
  from: THREE.Vector3,
  to: THREE.Vector3,
  highlighted: boolean,
  dimmed: boolean,
): THREE.Group {
  const group = new THREE.Group();
  const color = new THREE.Color(highlighted ? EDGE_HIGHLIGHT_COLOR : EDGE_COLOR);
  const axis = to.clone().sub(from).normalize();

  const lineMaterial = new THREE.LineBasicMaterial({ color });
  if (dimmed) {
    lineMaterial.transparent = true;
    lineMaterial.opacity = DIMMED_OPACITY;
  }
  const geometry = new THREE.BufferGeometry().setFromPoints([from, to]);
  const line = new THREE.Line(geometry, lineMaterial);
  line.userData = { role: 'line' };
  group.add(line);

  // Arrowheads sit just short of the endpoint they point at; bidirectional
  // edges get one at each end.
  const inset = ARROW_LENGTH * 1.4;
  if (edge.direction === 'a_to_b' || edge.direction === 'bidirectional') {
    const tip = to.clone().addScaledVector(axis, -inset);
    group.add(buildArrowhead(tip, axis, color, dimmed));
  }
  if (edge.direction === 'b_to_a' || edge.direction === 'bidirectional') {
    const tip = from.clone().addScaledVector(axis, inset);
    group.add(buildArrowhead(tip, axis.clone().negate(), color, dimmed));
  }

  // Cross-line ticks around the midpoint, one per counted dependency, with
  // the engine already collapsing anything past three to zero.
  if (edge.cross_lines > 0) {
    const up = Math.abs(axis.y) < 0.9
      ? new THREE.Vector3(0, 1, 0)
      : new THREE.Vector3(1, 0, 0);
    const across = new THREE.Vector3().crossVectors(axis, up).normalize();
    const span = to.distanceTo(from);
    const start = -((edge.cross_lines - 1) / 2) * TICK_SPACING;
    for (let i = 0; i < edge.cross_lines; i += 1) {
      const fraction = 0.5 + start + i * TICK_SPACING;
      const center = from.clone().addScaledVector(axis, span * fraction);
      group.add(buildTick(center, across, color));
    }
  }

  group.userData = {
    kind: 'edge',
    key: edgeKey(edge.a, edge.b),
    a: edge.a,
    b: edge.b,
    doc: edge,
  };
  return group;
}

// ----- Labels -----

function drawLabelSprite(text: string): THREE.Sprite | null {
  if (typeof document === 'undefined') return null;
  const canvas = document.createElement('canvas');
  const context = canvas.getContext('2d');
  if (!context) return null;
  const font = '600 28px system-ui, sans-serif';
  context.font = font;
  const width = Math.ceil(context.measureText(text).width) + 16;
  canvas.width = width;
  canvas.height = 40;
  context.font = font;
  context.fillStyle = '#e9ecef';
  context.textBaseline = 'middle';
  context.fillText(text, 8, 20);
  const texture = new THREE.CanvasTexture(canvas);
  const sprite = new THREE.Sprite(
    new THREE.SpriteMaterial({ map: texture, depthTest: false }),
  );
  sprite.scale.set(width / 10, 4, 1);
  return sprite;
}

// Re-evaluate every label against the current zoom. Creates, retexts, or
// hides sprites as the mode changes.
export function updateLabels(elements: SceneElements, view: ViewDoc, zoom: number): void {
  for (const node of view.nodes) {
    const text = labelText(node.id, zoom);
    const existing = elements.labels.get(node.id);
    if (text === null) {
      if (existing) existing.visible = false;
      continue;
    }
    if (existing && existing.userData.text === text) {
      existing.visible = true;
      continue;
    }
    if (existing) {
      existing.removeFromParent();
      existing.material.map?.dispose();
      existing.material.dispose();
      elements.labels.delete(node.id);
    }
    const sprite = drawLabelSprite(text);
    if (!sprite) continue;
    sprite.userData = { role: 'label', text };
    const mesh = elements.nodes.get(node.id);
    if (mesh) {
      sprite.position.set(0, mesh.scale.y * 0.5 + 2.2, 0);
      sprite.scale.multiplyScalar(1 / mesh.scale.x);
      mesh.add(sprite);
    }
    elements.labels.set(node.id, sprite);
  }
}

// ----- Scene assembly -----

export function buildScene(view: ViewDoc): SceneElements {
  checkView(view);
  const group = new THREE.Group();
  const nodes = new Map<string, THREE.Mesh>();
  const edges = new Map<string, THREE.Group>();
  const baseColors = new Map<string, string>();

  view.nodes.forEach((node, index) => {
    const mesh = buildNode(node, positionFor(view, node.id, index, view.nodes.length));
    if (node.self_calls > 0) mesh.add(buildSelfLoop(mesh));
    nodes.set(node.id, mesh);
    baseColors.set(nodeKey(node.id), node.color);
    group.add(mesh);
  });

  const highlightPairs = new Set(
    (view.highlight?.edges ?? []).map((e) => edgeKey(e.from, e.to)),
  );
  for (const edge of view.edges) {
    const from = nodes.get(edge.a);
    const to = nodes.get(edge.b);
    if (!from || !to) continue;
    const key = edgeKey(edge.a, edge.b);
    const highlighted = highlightPairs.has(key);
    const dimmed = Boolean(
      view.highlight &&
        !highlighted &&
        (from.userData.doc as NodeDoc).on_path === false &&
        (to.userData.doc as NodeDoc).on_path === false,
    );
    const edgeGroup = buildEdge(edge, from.position, to.position, highlighted, dimmed);
    edges.set(key, edgeGroup);
    baseColors.set(key, highlighted ? EDGE_HIGHLIGHT_COLOR : EDGE_COLOR);
    group.add(edgeGroup);
  }

  return { group, nodes, edges, labels: new Map(), baseColors };
}

function paintMaterial(material: THREE.Material, color: string): void {
  (material as THREE.MeshLambertMaterial | THREE.LineBasicMaterial).color.set(color);
}

// Apply playback colors on top of the base coloring; elements absent from
// the map fall back to their original color, so clearing the map restores
// the plain scene.
export function applyColors(elements: SceneElements, colors: Map<string, string>): void {
  for (const [id, mesh] of elements.nodes) {
    const key = nodeKey(id);
    paintMaterial(mesh.material as THREE.Material, colors.get(key) ?? elements.baseColors.get(key) ?? '#ffffff');
  }
  for (const [key, edgeGroup] of elements.edges) {
    const color = colors.get(key) ?? elements.baseColors.get(key) ?? EDGE_COLOR;
    for (const child of edgeGroup.children) {
      const material = (child as THREE.Mesh | THREE.Line).material as THREE.Material;
      paintMaterial(material, color);
    }
  }
}

export function disposeScene(elements: SceneElements): void {
  elements.group.traverse((object) => {
    const mesh = object as THREE.Mesh;
    if (mesh.geometry) mesh.geometry.dispose();
    const material = mesh.material as THREE.Material | undefined;
    if (material) material.dispose();
  });
}
