/** The dial-menu chat: two taps from template to sent message.
 *
 * Only catalog templates are offered; slot values are module picks.
 * There is no input element at all, so free text is impossible by
 * construction, not by validation.
 */

import type { CanvasApi } from './api.js';
import { DEFAULT_CONFIG, UiConfig } from './config.js';
import { makeControl } from './interaction.js';
import type { ChatTemplate, ModuleView } from './types.js';

export interface ChatDialEvents {
  /** Ask the surrounding UI for a module pick (favourites surface first). */
  pickModule: () => Promise<ModuleView | null>;
  onSent?: (rendered: string) => void;
}

export class ChatDial {
  readonly element: HTMLElement;

  constructor(
    doc: Document,
    private readonly api: CanvasApi,
    private readonly fromUser: string,
    private readonly toUser: string,
    private readonly events: ChatDialEvents,
    private readonly config: UiConfig = DEFAULT_CONFIG,
    private readonly clock?: () => number,
  ) {
    this.element = doc.createElement('nav');
    this.element.className = 'chat-dial';
    this.element.setAttribute('aria-label', 'Send a message');
  }

  async open(): Promise<void> {
    const doc = this.element.ownerDocument;
    const catalog = await this.api.chatTemplates();
    this.element.textContent = '';
    for (const template of catalog.templates) {
      const control = makeControl(
        doc,
        template.preview,
        () => void this.send(template),
        this.config,
        this.clock,
      );
      control.classList.add('chat-template');
      control.dataset.templateId = template.templateId;
      this.element.appendChild(control);
    }
  }

  private async send(template: ChatTemplate): Promise<void> {
    const slots: Record<string, string> = {};
    for (const slot of template.slots) {
      const picked = await this.events.pickModule();
      if (picked === null) {
        return; // pick cancelled; nothing sent
      }
      slots[slot] = picked.moduleId;
    }
    const sent = await this.api.sendChat(
      this.fromUser,
      this.toUser,
      template.templateId,
      slots,
    );
    this.events.onSent?.(sent.rendered);
  }
}
