/** Typed client for the community service HTTP API.
 *
 * This is the UI's only doorway to business logic: conditions are parsed
 * server-side, validation reports come from the validate endpoint, and
 * rankings arrive pre-sorted. Nothing is re-derived in the browser.
 */

import type {
  ChatCatalog,
  CompositionView,
  GraphDocument,
  ModuleView,
  ParseResponse,
  RewardsView,
  SearchResponse,
  ValidationReport,
} from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
    public readonly body: unknown,
  ) {
    super(message);
  }
}

export class CanvasApi {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { 'Content-Type': 'application/json' };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const payload = response.status === 204 ? null : await response.json();
    if (!response.ok) {
      const code = (payload && (payload as { error?: string }).error) || 'Error';
      const message =
        (payload && (payload as { message?: string }).message) || response.statusText;
      throw new ApiError(response.status, code, message, payload);
    }
    return payload as T;
  }

  register(logonId: string, password: string, avatarName?: string) {
    return this.request<{ userId: string; avatarNameNotice: string | null }>(
      'POST',
      '/users',
      { logonId, password, avatarName },
    );
  }

  login(logonId: string, password: string) {
    return this.request<{ userId: string; token: string }>('POST', '/login', {
      logonId,
      password,
    });
  }

  listModules() {
    return this.request<{ modules: ModuleView[] }>('GET', '/modules');
  }

  getModule(moduleId: string) {
    return this.request<ModuleView>('GET', `/modules/${moduleId}`);
  }

  search(query: string, typeFilter?: string, userId?: string) {
    const params = new URLSearchParams({ q: query });
    if (typeFilter) params.set('type', typeFilter);
    if (userId) params.set('userId', userId);
    return this.request<SearchResponse>('GET', `/search?${params.toString()}`);
  }

  createComposition(title: string, authorId: string) {
    return this.request<{ module: ModuleView; graph: GraphDocument }>(
      'POST',
      '/compositions',
      { title, authorId },
    );
  }

  getComposition(compositionId: string) {
    return this.request<CompositionView>('GET', `/compositions/${compositionId}`);
  }

  updateComposition(
    compositionId: string,
    graph: GraphDocument,
    expectedVersion: number,
    editorId?: string,
  ) {
    return this.request<CompositionView>('PUT', `/compositions/${compositionId}`, {
      graph,
      expectedVersion,
      editorId,
    });
  }

  validateComposition(compositionId: string) {
    return this.request<ValidationReport>(
      'POST',
      `/compositions/${compositionId}/validate`,
    );
  }

  parseCondition(source: string) {
    return this.request<ParseResponse>('POST', '/conditions/parse', { source });
  }

  deriveModule(moduleId: string, newAuthorId: string) {
    return this.request<ModuleView>('POST', `/modules/${moduleId}/derive`, {
      newAuthorId,
    });
  }

  publishModule(moduleId: string) {
    return this.request<ModuleView>('POST', `/modules/${moduleId}/publish`);
  }

  likeModule(moduleId: string, userId: string) {
    return this.request<{ moduleId: string; likes: number }>(
      'POST',
      `/modules/${moduleId}/like`,
      { userId },
    );
  }

  favouriteModule(moduleId: string, userId: string) {
    return this.request<unknown>('POST', `/modules/${moduleId}/favourite`, { userId });
  }

  favouriteAvatar(ownerId: string, userId: string) {
    return this.request<unknown>('POST', `/users/${ownerId}/avatar/favourite`, {
      userId,
    });
  }

  rewards(userId: string) {
    return this.request<RewardsView>('GET', `/users/${userId}/rewards`);
  }

  chatTemplates() {
    return this.request<ChatCatalog>('GET', '/chat/templates');
  }

  sendChat(fromUser: string, toUser: string, templateId: string, slots: Record<string, string>) {
    return this.request<{ rendered: string }>('POST', '/chat', {
      fromUser,
      toUser,
      templateId,
      slots,
    });
  }

  exportUrl(compositionId: string): string {
    return `${this.baseUrl}/compositions/${compositionId}/export`;
  }
}
