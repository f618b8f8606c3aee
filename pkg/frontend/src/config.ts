/** Child-interaction tuning. The service demands slack and buffering;
 * the numbers are deployment-configurable, these are the defaults. */

export interface UiConfig {
  /** Extra hit region, in px, around every interactive target. */
  hitSlackPx: number;
  /** Minimum visual size of tap targets, in px. */
  minTargetPx: number;
  /** A burst of taps inside this window triggers exactly one action. */
  tapDebounceMs: number;
  /** Locale for avatar hints and chat rendering. */
  locale: string;
}

export const DEFAULT_CONFIG: UiConfig = {
  hitSlackPx: 8,
  minTargetPx: 44,
  tapDebounceMs: 300,
  locale: 'en',
};
