/** The module search panel.
 *
 * Results come pre-ranked from the service (favourites first, then
 * likes, then title) and are never re-sorted here. Reuse before
 * novelty: the existing-module results always render above the single
 * "create a new module" affordance.
 */

import type { CanvasApi } from './api.js';
import { DEFAULT_CONFIG, UiConfig } from './config.js';
import { makeControl } from './interaction.js';
import type { ModuleView } from './types.js';

export interface SearchPanelEvents {
  onPick: (module: ModuleView) => void;
  onCreateNew: () => void;
}

export class SearchPanel {
  readonly element: HTMLElement;
  private readonly resultsHost: HTMLElement;

  constructor(
    doc: Document,
    private readonly api: CanvasApi,
    private readonly userId: string,
    private readonly events: SearchPanelEvents,
    private readonly config: UiConfig = DEFAULT_CONFIG,
    private readonly clock?: () => number,
  ) {
    this.element = doc.createElement('section');
    this.element.className = 'search-panel';

    const query = doc.createElement('input');
    query.type = 'search';
    query.className = 'search-query';
    query.setAttribute('aria-label', 'Search modules');

    const typeFilter = doc.createElement('select');
    typeFilter.className = 'search-type-filter';
    for (const [value, label] of [
      ['', 'all types'],
      ['atomic', 'single modules'],
      ['composite', 'compositions'],
    ]) {
      const option = doc.createElement('option');
      option.value = value;
      option.textContent = label;
      typeFilter.appendChild(option);
    }

    const run = () => void this.run(query.value, typeFilter.value || undefined);
    query.addEventListener('change', run);
    typeFilter.addEventListener('change', run);

    this.element.appendChild(query);
    this.element.appendChild(typeFilter);
    this.resultsHost = doc.createElement('div');
    this.resultsHost.className = 'search-results';
    this.element.appendChild(this.resultsHost);
  }

  async run(query: string, typeFilter?: string): Promise<void> {
    const doc = this.element.ownerDocument;
    const response = await this.api.search(query, typeFilter, this.userId);
    this.resultsHost.textContent = '';
    for (const module of response.results) {
      const control = makeControl(
        doc,
        module.title,
        () => this.events.onPick(module),
        this.config,
        this.clock,
      );
      control.classList.add('search-result');
      control.dataset.moduleId = module.moduleId;
      if (module.favourite) {
        control.classList.add('favourite');
      }
      this.resultsHost.appendChild(control);
    }
    if (response.createNew) {
      const create = makeControl(
        doc,
        'Create a new module',
        () => this.events.onCreateNew(),
        this.config,
        this.clock,
      );
      create.classList.add('create-new');
      this.resultsHost.appendChild(create); // always after the results
    }
  }
}
