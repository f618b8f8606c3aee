/** Application shell: the canvas is the first paint.
 *
 * No splash screen, no loading route: createApp synchronously mounts the
 * canvas, toolbar, avatar panel and toast area, then data arrives into
 * them. Every pointer gesture has a button/keyboard twin wired to the
 * same controller call, so both paths hit the API identically.
 */

import type { CanvasApi } from './api.js';
import { CanvasController } from './canvas.js';
import { DEFAULT_CONFIG, UiConfig } from './config.js';
import { AvatarHintPanel } from './hints.js';
import { debounced, makeControl } from './interaction.js';
import { ToastQueue } from './toasts.js';
import type { Point } from './types.js';

export interface AppOptions {
  config?: UiConfig;
  idGen?: () => string;
  clock?: () => number;
  /** The structured condition picked for the next arrow; null = default. */
  nextCondition?: () => string | null;
  /** Module chosen when the add button (keyboard path) is used. */
  pickModule?: () => Promise<string | null>;
  /** Placing an empty module sends the author into its own editor. */
  onOpenEditor?: (moduleRef: string) => void;
}

export class App {
  readonly controller: CanvasController;
  readonly hints: AvatarHintPanel;
  readonly toasts: ToastQueue;
  readonly canvasElement: HTMLElement;
  readonly toolbarElement: HTMLElement;
  private dragModuleRef: string | null = null;

  constructor(
    root: HTMLElement,
    private readonly api: CanvasApi,
    compositionId: string,
    userId: string,
    private readonly options: AppOptions = {},
  ) {
    const doc = root.ownerDocument;
    const config = options.config ?? DEFAULT_CONFIG;

    // first paint: the canvas itself, synchronously
    const shell = doc.createElement('div');
    shell.className = 'canvas-root';
    this.canvasElement = doc.createElement('main');
    this.canvasElement.className = 'canvas';
    this.canvasElement.setAttribute('role', 'application');
    this.canvasElement.tabIndex = 0;

    this.toolbarElement = doc.createElement('header');
    this.toolbarElement.className = 'toolbar';
    shell.appendChild(this.toolbarElement);
    shell.appendChild(this.canvasElement);

    this.hints = new AvatarHintPanel(doc, config.locale, (nodeIds) =>
      this.highlight(nodeIds),
    );
    shell.appendChild(this.hints.element);
    this.toasts = new ToastQueue(doc);
    shell.appendChild(this.toasts.element);
    root.appendChild(shell);

    this.controller = new CanvasController(
      api,
      compositionId,
      userId,
      {
        onChange: () => this.renderNodes(),
        onReport: (report) => this.hints.render(report),
        onVersionConflict: () => this.toasts.push('Someone else saved first; reloading'),
      },
      options.idGen,
    );

    const addButton = makeControl(
      doc,
      'Add module',
      () => void this.addModuleViaButton(),
      config,
      options.clock,
    );
    addButton.classList.add('add-module');
    this.toolbarElement.appendChild(addButton);

    // pointer path: drop a palette drag onto the canvas
    this.canvasElement.addEventListener('mouseup', (event) => {
      if (this.dragModuleRef !== null) {
        const at: Point = { x: event.clientX, y: event.clientY };
        const moduleRef = this.dragModuleRef;
        this.dragModuleRef = null;
        void this.placeAndMaybeEdit(moduleRef, at);
      }
    });
  }

  /** Both input paths land here, so their API traffic stays identical;
   * an empty module continues into its own editor. */
  private async placeAndMaybeEdit(moduleRef: string, at?: Point): Promise<void> {
    const nodeId = await this.controller.placeModule(moduleRef, at);
    if (nodeId === null || !this.options.onOpenEditor) {
      return;
    }
    const view = await this.api.getModule(moduleRef);
    if (view.empty) {
      this.options.onOpenEditor(moduleRef);
    }
  }

  async start(): Promise<void> {
    await this.controller.load();
  }

  /** Palette entries call this on mousedown to begin a drag. */
  beginPaletteDrag(moduleRef: string): void {
    this.dragModuleRef = moduleRef;
  }

  private async addModuleViaButton(): Promise<void> {
    const pick = this.options.pickModule;
    if (!pick) {
      return;
    }
    const moduleRef = await pick();
    if (moduleRef !== null) {
      await this.placeAndMaybeEdit(moduleRef);
    }
  }

  private renderNodes(): void {
    const doc = this.canvasElement.ownerDocument;
    const config = this.options.config ?? DEFAULT_CONFIG;
    this.canvasElement.textContent = '';
    for (const node of this.controller.state.graph.nodes) {
      const el = doc.createElement('div');
      el.className = 'canvas-node';
      el.dataset.nodeId = node.nodeId;
      el.dataset.hitSlack = String(config.hitSlackPx);
      el.tabIndex = 0;
      el.setAttribute('role', 'button');
      el.style.minWidth = `${config.minTargetPx}px`;
      el.style.minHeight = `${config.minTargetPx}px`;
      el.style.padding = `${config.hitSlackPx}px`;
      el.style.margin = `-${config.hitSlackPx}px`;
      el.textContent = node.displayLabel ?? node.moduleRef;
      const position = this.controller.state.positions.get(node.nodeId);
      if (position) {
        el.style.left = `${position.x}px`;
        el.style.top = `${position.y}px`;
      }

      // pointer path: press starts an arrow, release on another node ends it
      el.addEventListener('mousedown', () => {
        this.controller.beginArrowDrag(node.nodeId);
      });
      el.addEventListener('mouseup', (event) => {
        const source = this.controller.state.pendingEdgeSource;
        if (source !== null && source !== node.nodeId) {
          event.stopPropagation();
          void this.controller.releaseArrowAt(node.nodeId, this.pickCondition());
        }
      });
      // keyboard path: Enter marks the source, Enter on a target confirms
      el.addEventListener(
        'keydown',
        debounced(
          (event) => {
            if ((event as KeyboardEvent).key !== 'Enter') {
              return;
            }
            const source = this.controller.state.pendingEdgeSource;
            if (source === null) {
              this.controller.markFlowSource(node.nodeId);
            } else if (source !== node.nodeId) {
              void this.controller.confirmFlowTarget(
                node.nodeId,
                this.pickCondition(),
              );
            }
          },
          config.tapDebounceMs,
          this.options.clock,
        ),
      );
      this.canvasElement.appendChild(el);
    }
  }

  private pickCondition(): string | null {
    return this.options.nextCondition ? this.options.nextCondition() : null;
  }

  private highlight(nodeIds: string[]): void {
    for (const el of Array.from(
      this.canvasElement.querySelectorAll<HTMLElement>('.canvas-node'),
    )) {
      el.classList.toggle(
        'highlighted',
        nodeIds.includes(el.dataset.nodeId ?? ''),
      );
    }
  }
}

/** Mount the app; the canvas exists in the DOM before this returns. */
export function createApp(
  root: HTMLElement,
  api: CanvasApi,
  compositionId: string,
  userId: string,
  options: AppOptions = {},
): App {
  return new App(root, api, compositionId, userId, options);
}
