import type {
  FunctionViewDoc,
  NodeDoc,
  RankingDoc,
  RunDoc,
  ViewDoc,
} from './types';

// Plain-DOM side panels. No framework; each function fills one container.

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function showToast(message: string): void {
  const host = document.getElementById('toasts');
  if (!host) return;
  const toast = el('div', 'toast', message);
  host.appendChild(toast);
  setTimeout(() => toast.remove(), 6000);
}

export function showBanner(message: string | null): void {
  const banner = document.getElementById('banner');
  if (!banner) return;
  banner.textContent = message ?? '';
  banner.style.display = message ? 'block' : 'none';
}

export function renderDetail(
  container: HTMLElement,
  node: NodeDoc | null,
  view: ViewDoc | null,
  rank: number | null,
): void {
  container.innerHTML = '';
  if (!node) {
    container.appendChild(el('p', 'hint', 'Click a node for details.'));
    return;
  }
  container.appendChild(el('h3', undefined, node.id));
  const rows: Array<[string, string]> = [
    ['kind', node.kind],
    ['controller', node.controller],
    ['in-degree', String(node.in_degree)],
    ['out-degree', String(node.out_degree)],
    ['size', String(node.size)],
    ['self calls', String(node.self_calls)],
  ];
  if (rank !== null) rows.push(['dependency rank', `#${rank}`]);
  const swatchColor = view?.controllers.find((c) => c.key === node.controller)?.color ?? node.color;
  const table = el('table');
  for (const [label, value] of rows) {
    const tr = el('tr');
    tr.appendChild(el('td', 'label', label));
    tr.appendChild(el('td', undefined, value));
    table.appendChild(tr);
  }
  container.appendChild(table);
  const swatch = el('div', 'swatch');
  swatch.style.background = swatchColor;
  container.appendChild(swatch);
}

export function renderRanking(container: HTMLElement, ranking: RankingDoc): void {
  container.innerHTML = '';
  container.appendChild(el('h3', undefined, ranking.metric));
  if (ranking.entries.length === 0) {
    container.appendChild(el('p', 'hint', 'No entries. Upload traces first.'));
    return;
  }
  const table = el('table');
  for (const entry of ranking.entries.slice(0, 15)) {
    const tr = el('tr');
    tr.appendChild(el('td', 'label', `#${entry.rank}`));
    tr.appendChild(el('td', undefined, entry.key ?? entry.id ?? ''));
    tr.appendChild(el('td', 'score', String(entry.score)));
    table.appendChild(tr);
  }
  container.appendChild(table);
}

export function renderFunctionView(container: HTMLElement, doc: FunctionViewDoc): void {
  container.innerHTML = '';
  container.appendChild(el('h3', undefined, `${doc.service} functions`));
  if (doc.messages.length === 0) {
    container.appendChild(el('p', 'hint', 'No declared call flow.'));
    return;
  }
  const list = el('ol');
  for (const message of doc.messages) {
    list.appendChild(el('li', undefined, `${message.from} -> ${message.to}`));
  }
  container.appendChild(list);
  container.appendChild(el('p', 'hint', `participants: ${doc.participants.join(', ')}`));
}

export function renderRunStatus(container: HTMLElement, run: RunDoc | null, live: string): void {
  container.innerHTML = '';
  if (!run && !live) return;
  container.appendChild(el('p', undefined, live || `run ${run?.id.slice(0, 8)}: ${run?.state}`));
}
