/** Reward toasts: short-lived celebration banners for badges and points. */

export class ToastQueue {
  readonly element: HTMLElement;

  constructor(
    doc: Document,
    private readonly lifetimeMs: number = 4000,
    private readonly schedule: (cb: () => void, ms: number) => unknown = (cb, ms) =>
      setTimeout(cb, ms),
  ) {
    this.element = doc.createElement('div');
    this.element.className = 'toast-queue';
    this.element.setAttribute('role', 'status');
    this.element.setAttribute('aria-live', 'polite');
  }

  push(label: string): void {
    const doc = this.element.ownerDocument;
    const toast = doc.createElement('div');
    toast.className = 'toast';
    toast.textContent = label;
    this.element.appendChild(toast);
    this.schedule(() => toast.remove(), this.lifetimeMs);
  }

  badgeEarned(badgeLabel: string): void {
    this.push(badgeLabel);
  }
}
