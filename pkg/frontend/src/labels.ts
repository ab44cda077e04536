// Zoom-dependent node labels. Names stay out of the way until the camera is
// close enough: nothing below zoom 1.0, an 8-character stub between 1.0 and
// 2.0, the full name from 2.0 up. The thresholds are fixed on purpose so the
// behavior is testable instead of a continuous fade.

export const ZOOM_MIN = 0.2;
export const ZOOM_MAX = 8;

export const LABEL_SHOW_AT = 1.0;
export const LABEL_FULL_AT = 2.0;
export const TRUNCATED_LENGTH = 8;

export type LabelMode = 'hidden' | 'truncated' | 'full';

export function clampZoom(zoom: number): number {
  if (Number.isNaN(zoom)) return ZOOM_MIN;
  return Math.min(ZOOM_MAX, Math.max(ZOOM_MIN, zoom));
}

export function labelMode(zoom: number): LabelMode {
  if (zoom < LABEL_SHOW_AT) return 'hidden';
  if (zoom < LABEL_FULL_AT) return 'truncated';
  return 'full';
}

// null means "draw no label at all".
export function labelText(name: string, zoom: number): string | null {
  switch (labelMode(zoom)) {
    case 'hidden':
      return null;
    case 'truncated':
      return name.length > TRUNCATED_LENGTH ? name.slice(0, TRUNCATED_LENGTH) : name;
    case 'full':
      return name;
  }
}
