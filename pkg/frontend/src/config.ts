// The one configuration knob: where the engine lives. Resolution order is
// ?api= query parameter, then a global set by the hosting page, then the
// page's own origin (which is what you get when the engine serves the UI
// itself via --ui-dir).

declare global {
  interface Window {
    MSVIS_BASE_URL?: string;
  }
}

export function resolveBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get('api');
  const base = fromQuery ?? window.MSVIS_BASE_URL ?? '';
  return base.replace(/\/+$/, '');
}
