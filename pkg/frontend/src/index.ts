export { ApiError, CanvasApi } from './api.js';
export { App, createApp } from './app.js';
export { CanvasController } from './canvas.js';
export type { CanvasViewState } from './canvas.js';
export { ChatDial } from './chat.js';
export {
  COMPARATORS,
  METRICS,
  buildSource,
  confirmDraft,
  initialDraft,
  renderDialog,
} from './conditionDialog.js';
export { DEFAULT_CONFIG } from './config.js';
export type { UiConfig } from './config.js';
export { AvatarHintPanel, phraseIssue } from './hints.js';
export { TapDebouncer, debounced, hitContains, makeControl } from './interaction.js';
export { SearchPanel } from './search.js';
export { ToastQueue } from './toasts.js';
export type * from './types.js';
