import * as THREE from 'three';
import { OrbitControls } from 'three/addons/controls/OrbitControls.js';
import { ApiClient, EngineError } from './api';
import { resolveBaseUrl } from './config';
import { clampZoom } from './labels';
import {
  renderDetail,
  renderFunctionView,
  renderRanking,
  renderRunStatus,
  showBanner,
  showToast,
} from './panels';
import { Playback, STATUS_COLORS } from './playback';
import {
  applyColors,
  buildScene,
  disposeScene,
  MalformedView,
  updateLabels,
} from './render';
import type { SceneElements } from './render';
import { SceneState } from './scene-state';
import type { NodeDoc, SimEventDoc, ViewLevel } from './types';
import './style.css';

const BASE_CAMERA_DISTANCE = 150;

const api = new ApiClient(resolveBaseUrl());
const state = new SceneState();

let systemId: string | null = null;
let level: ViewLevel = 'service';
let elements: SceneElements | null = null;
let eventSource: EventSource | null = null;

// ----- Three.js plumbing -----

const viewport = document.getElementById('viewport') as HTMLElement;
const scene = new THREE.Scene();
scene.background = new THREE.Color('#141619');
const camera = new THREE.PerspectiveCamera(55, 1, 0.1, 2000);
camera.position.set(0, 40, BASE_CAMERA_DISTANCE);
const renderer = new THREE.WebGLRenderer({ antialias: true });
viewport.appendChild(renderer.domElement);

scene.add(new THREE.AmbientLight(0xffffff, 0.75));
const keyLight = new THREE.DirectionalLight(0xffffff, 1.4);
keyLight.position.set(80, 120, 60);
scene.add(keyLight);

const controls = new OrbitControls(camera, renderer.domElement);
controls.enableDamping = true;

function resize(): void {
  const width = viewport.clientWidth;
  const height = viewport.clientHeight;
  camera.aspect = width / height;
  camera.updateProjectionMatrix();
  renderer.setSize(width, height);
}
window.addEventListener('resize', resize);

function currentZoom(): number {
  return clampZoom(BASE_CAMERA_DISTANCE / controls.getDistance());
}

let lastZoom = -1;
function animate(): void {
  requestAnimationFrame(animate);
  controls.update();
  const zoom = currentZoom();
  if (zoom !== lastZoom && elements && state.view) {
    lastZoom = zoom;
    state.setZoom(zoom);
    updateLabels(elements, state.view, zoom);
  }
  renderer.render(scene, camera);
}

// ----- View loading -----

function swapScene(next: SceneElements): void {
  if (elements) {
    scene.remove(elements.group);
    disposeScene(elements);
  }
  elements = next;
  scene.add(next.group);
  lastZoom = -1;
  refreshPlaybackColors();
}

async function loadView(fetcher: () => Promise<import('./types').ViewDoc>): Promise<void> {
  try {
    const view = await fetcher();
    state.setView(view, state.filter);
    swapScene(buildScene(view));
    showBanner(null);
    updateSelection(null);
  } catch (error) {
    if (error instanceof MalformedView) {
      showBanner(`Cannot render view: ${error.message}`);
    } else {
      reportError(error);
    }
  }
}

function reloadLevel(): void {
  if (!systemId) return;
  state.filter = null;
  void loadView(() => api.view(systemId as string, level));
}

function reportError(error: unknown): void {
  if (error instanceof EngineError) {
    showToast(`${error.kind}: ${error.message}`);
  } else {
    showToast(String(error));
  }
}

// ----- Selection, click, drag -----

const raycaster = new THREE.Raycaster();
const pointer = new THREE.Vector2();
let dragging: { id: string; plane: THREE.Plane; offset: THREE.Vector3 } | null = null;
let pointerDownAt: [number, number] | null = null;

function nodeAtPointer(event: PointerEvent): THREE.Mesh | null {
  const rect = renderer.domElement.getBoundingClientRect();
  pointer.x = ((event.clientX - rect.left) / rect.width) * 2 - 1;
  pointer.y = -((event.clientY - rect.top) / rect.height) * 2 + 1;
  raycaster.setFromCamera(pointer, camera);
  if (!elements) return null;
  const hits = raycaster.intersectObjects([...elements.nodes.values()], false);
  return (hits[0]?.object as THREE.Mesh) ?? null;
}

function updateSelection(node: NodeDoc | null): void {
  state.select(node ? node.id : null);
  const detail = document.getElementById('detail') as HTMLElement;
  renderDetail(detail, node, state.view, null);
  if (node && systemId && state.view?.level === 'service') {
    void api
      .metric(systemId, 'service-dependency')
      .then((ranking) => {
        const entry = ranking.entries.find((e) => e.id === node.id);
        renderDetail(detail, node, state.view, entry ? entry.rank : null);
      })
      .catch(() => undefined);
  }
}

renderer.domElement.addEventListener('pointerdown', (event) => {
  pointerDownAt = [event.clientX, event.clientY];
  const mesh = nodeAtPointer(event);
  if (!mesh) return;
  // Drag a node: client-side rearrangement only, the engine layout is
  // untouched and a reload snaps everything back.
  controls.enabled = false;
  const normal = camera.getWorldDirection(new THREE.Vector3());
  const plane = new THREE.Plane().setFromNormalAndCoplanarPoint(normal, mesh.position);
  const hit = new THREE.Vector3();
  raycaster.ray.intersectPlane(plane, hit);
  dragging = {
    id: mesh.userData.id as string,
    plane,
    offset: mesh.position.clone().sub(hit),
  };
});

renderer.domElement.addEventListener('pointermove', (event) => {
  if (!dragging || !elements) return;
  nodeAtPointer(event);
  const hit = new THREE.Vector3();
  if (!raycaster.ray.intersectPlane(dragging.plane, hit)) return;
  const mesh = elements.nodes.get(dragging.id);
  if (!mesh) return;
  mesh.position.copy(hit.add(dragging.offset));
  state.dragTo(dragging.id, [mesh.position.x, mesh.position.y, mesh.position.z]);
  refreshEdgesFor(dragging.id);
});

renderer.domElement.addEventListener('pointerup', (event) => {
  const wasDrag =
    dragging &&
    pointerDownAt &&
    Math.hypot(event.clientX - pointerDownAt[0], event.clientY - pointerDownAt[1]) > 4;
  if (!wasDrag) {
    const mesh = nodeAtPointer(event);
    updateSelection(mesh ? (mesh.userData.doc as NodeDoc) : null);
  }
  dragging = null;
  pointerDownAt = null;
  controls.enabled = true;
});

// Rebuild the edge groups touching a dragged node so the lines follow it.
function refreshEdgesFor(nodeId: string): void {
  if (!elements || !state.view) return;
  const view = state.view;
  const touched = view.edges.filter((e) => e.a === nodeId || e.b === nodeId);
  if (touched.length === 0) return;
  const rebuilt = buildScene(withOverriddenLayout());
  for (const edge of touched) {
    const key = `edge:${edge.a < edge.b ? `${edge.a}|${edge.b}` : `${edge.b}|${edge.a}`}`;
    const previous = elements.edges.get(key);
    const next = rebuilt.edges.get(key);
    if (!previous || !next) continue;
    elements.group.remove(previous);
    elements.group.add(next);
    elements.edges.set(key, next);
  }
  disposeScene({ ...rebuilt, group: new THREE.Group() });
  refreshPlaybackColors();
}

function withOverriddenLayout(): import('./types').ViewDoc {
  const view = state.view as import('./types').ViewDoc;
  if (!view.layout) return view;
  const positions: Record<string, [number, number, number]> = {};
  for (const node of view.nodes) {
    const current = state.positionOf(node.id);
    const base = view.layout.positions[node.id];
    positions[node.id] = state.hasOverride(node.id) && current
      ? [current[0] / 60, current[1] / 60, current[2] / 60]
      : base ?? [0, 0, 0];
  }
  return { ...view, layout: { ...view.layout, positions } };
}

// ----- Toolbar -----

function byId<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

const systemSelect = byId<HTMLSelectElement>('system-select');

async function loadSystems(): Promise<void> {
  try {
    const { systems } = await api.listSystems();
    systemSelect.innerHTML = '';
    for (const system of systems) {
      const option = document.createElement('option');
      option.value = system.system_id;
      option.textContent = `${system.system_name} (${system.services})`;
      systemSelect.appendChild(option);
    }
    if (systems.length > 0 && systems[0]) {
      systemId = systems[0].system_id;
      systemSelect.value = systemId;
      reloadLevel();
    }
  } catch (error) {
    reportError(error);
  }
}

systemSelect.addEventListener('change', () => {
  systemId = systemSelect.value;
  reloadLevel();
});

byId<HTMLButtonElement>('level-system').addEventListener('click', () => {
  level = 'system';
  reloadLevel();
});
byId<HTMLButtonElement>('level-service').addEventListener('click', () => {
  level = 'service';
  reloadLevel();
});

byId<HTMLButtonElement>('filter-node').addEventListener('click', () => {
  if (!systemId || !state.selected) {
    showToast('Select a node first.');
    return;
  }
  const id = state.selected;
  state.filter = { kind: 'node', id };
  void loadView(() => api.filterNode(systemId as string, id));
});

byId<HTMLFormElement>('filter-path-form').addEventListener('submit', (event) => {
  event.preventDefault();
  const key = byId<HTMLInputElement>('filter-path-input').value.trim();
  if (!systemId || !key) return;
  state.filter = { kind: 'path', key };
  void loadView(() => api.filterPath(systemId as string, key));
});

byId<HTMLButtonElement>('filter-clear').addEventListener('click', reloadLevel);

for (const metric of ['path-hits', 'path-length', 'service-dependency']) {
  byId<HTMLButtonElement>(`metric-${metric}`).addEventListener('click', () => {
    if (!systemId) return;
    void api
      .metric(systemId, metric)
      .then((ranking) => renderRanking(byId('ranking'), ranking))
      .catch(reportError);
  });
}

byId<HTMLButtonElement>('function-view').addEventListener('click', () => {
  if (!systemId || !state.selected || state.view?.level !== 'service') {
    showToast('Select a service node in the service view first.');
    return;
  }
  void api
    .functionView(systemId, state.selected)
    .then((doc) => renderFunctionView(byId('ranking'), doc))
    .catch(reportError);
});

// ----- Simulation panel -----

function refreshPlaybackColors(): void {
  if (!elements) return;
  applyColors(elements, state.playback ? state.playback.colorMap() : new Map());
}

const simForm = byId<HTMLFormElement>('sim-form');
simForm.addEventListener('submit', (event) => {
  event.preventDefault();
  if (!systemId) return;
  const mode = byId<HTMLSelectElement>('sim-mode').value;
  const path = byId<HTMLInputElement>('sim-path').value.trim();
  const failNode = byId<HTMLInputElement>('sim-fail-node').value.trim();
  const failEdge = byId<HTMLInputElement>('sim-fail-edge').value.trim();

  const failures: unknown[] = [];
  if (failNode) failures.push({ target: 'node', node_id: failNode, kind: 'timeout' });
  if (failEdge) {
    const [from, to] = failEdge.split('>');
    failures.push({ target: 'edge', from_id: from ?? '', to_id: to ?? '' });
  }
  const config =
    mode === 'mock'
      ? { start_mode: 'mock', path, mock_payload: '{}', failures, tick: 250 }
      : { start_mode: 'trace', trace_ref: path || 'auto', failures, tick: 250 };

  void startSimulation(config);
});

async function startSimulation(config: unknown): Promise<void> {
  if (!systemId) return;
  eventSource?.close();
  try {
    const { sim_id } = await api.createSimulation(systemId, config);
    const playback = state.startPlayback();
    refreshPlaybackColors();
    subscribe(sim_id, playback);
  } catch (error) {
    reportError(error);
  }
}

function subscribe(simId: string, playback: Playback): void {
  const status = byId<HTMLElement>('run-status');
  const source = new EventSource(api.eventStreamUrl(systemId as string, simId));
  eventSource = source;
  source.addEventListener('sim', (event) => {
    const doc = JSON.parse((event as MessageEvent).data) as SimEventDoc;
    playback.apply(doc);
    refreshPlaybackColors();
    renderRunStatus(status, null, `step ${doc.step}: ${doc.subject} ${doc.status}`);
  });
  source.addEventListener('state', (event) => {
    const doc = JSON.parse((event as MessageEvent).data) as { state: string };
    renderRunStatus(status, null, `run ${doc.state}`);
    source.close();
  });
  source.onerror = () => {
    source.close();
  };
}

byId<HTMLButtonElement>('sim-clear').addEventListener('click', () => {
  eventSource?.close();
  state.stopPlayback();
  refreshPlaybackColors();
  renderRunStatus(byId('run-status'), null, '');
});

// Legend for playback colors.
const legend = byId<HTMLElement>('legend');
for (const [label, color] of Object.entries(STATUS_COLORS)) {
  const item = document.createElement('span');
  item.className = 'legend-item';
  const dot = document.createElement('i');
  dot.style.background = color;
  item.appendChild(dot);
  item.appendChild(document.createTextNode(label));
  legend.appendChild(item);
}

resize();
animate();
void loadSystems();
