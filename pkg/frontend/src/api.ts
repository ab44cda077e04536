import type {
  FunctionViewDoc,
  RankingDoc,
  RunDoc,
  SystemInfo,
  TraceReport,
  ViewDoc,
} from './types';

// Error body shape the engine uses for every non-2xx response.
export class EngineError extends Error {
  readonly status: number;
  readonly kind: string;

  constructor(status: number, kind: string, detail: string) {
    super(detail);
    this.status = status;
    this.kind = kind;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, '');
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    const text = await response.text();
    if (!response.ok) {
      let kind = 'HttpError';
      let detail = text || `HTTP ${response.status}`;
      try {
        const body = JSON.parse(text);
        if (typeof body.error === 'string') kind = body.error;
        if (typeof body.detail === 'string') detail = body.detail;
      } catch {
        // non-JSON error body, keep the raw text
      }
      throw new EngineError(response.status, kind, detail);
    }
    return JSON.parse(text) as T;
  }

  listSystems(): Promise<{ systems: SystemInfo[] }> {
    return this.request('/api/systems');
  }

  registerSystem(manifestJson: string): Promise<{ system_id: string }> {
    return this.request('/api/systems', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: manifestJson,
    });
  }

  uploadTraces(systemId: string, spanLines: string): Promise<TraceReport> {
    return this.request(`/api/systems/${systemId}/traces`, {
      method: 'POST',
      body: spanLines,
    });
  }

  view(systemId: string, level: string, layoutSeed = 0): Promise<ViewDoc> {
    return this.request(
      `/api/systems/${systemId}/views/${level}?layout_seed=${layoutSeed}`,
    );
  }

  functionView(
    systemId: string,
    service: string,
    endpoint?: string,
  ): Promise<FunctionViewDoc> {
    const suffix = endpoint ? `?endpoint=${encodeURIComponent(endpoint)}` : '';
    return this.request(
      `/api/systems/${systemId}/views/function/${encodeURIComponent(service)}${suffix}`,
    );
  }

  filterNode(systemId: string, nodeId: string, layoutSeed = 0): Promise<ViewDoc> {
    return this.request(
      `/api/systems/${systemId}/filter/node/${encodeURIComponent(nodeId)}?layout_seed=${layoutSeed}`,
    );
  }

  filterPath(systemId: string, pathKey: string, layoutSeed = 0): Promise<ViewDoc> {
    return this.request(
      `/api/systems/${systemId}/filter/path?path=${encodeURIComponent(pathKey)}&layout_seed=${layoutSeed}`,
    );
  }

  metric(systemId: string, name: string): Promise<RankingDoc> {
    return this.request(`/api/systems/${systemId}/metrics/${name}`);
  }

  createSimulation(systemId: string, config: unknown): Promise<{ sim_id: string }> {
    return this.request(`/api/systems/${systemId}/simulations`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(config),
    });
  }

  simulation(systemId: string, simId: string): Promise<RunDoc> {
    return this.request(`/api/systems/${systemId}/simulations/${simId}`);
  }

  eventStreamUrl(systemId: string, simId: string): string {
    return `${this.base}/api/systems/${systemId}/simulations/${simId}/events`;
  }
}
