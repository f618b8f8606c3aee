import { describe, expect, it } from 'vitest';

import { ApiError, CanvasApi } from '../src/api.js';
import { FakeServer } from './fakeServer.js';

describe('api client', () => {
  it('serializes requests and parses responses', async () => {
    const server = new FakeServer();
    const api = new CanvasApi('', server.fetch);
    const view = await api.getComposition('comp-1');
    expect(view.graph.compositionId).toBe('comp-1');
    expect(view.version).toBe(1);
    expect(server.calls[0]).toEqual({
      method: 'GET',
      path: '/compositions/comp-1',
      body: undefined,
    });
  });

  it('carries expectedVersion on updates', async () => {
    const server = new FakeServer();
    const api = new CanvasApi('', server.fetch);
    const view = await api.getComposition('comp-1');
    const updated = await api.updateComposition('comp-1', view.graph, view.version, 'u1');
    expect(updated.version).toBe(2);
    const put = server.calls[1];
    expect(put.method).toBe('PUT');
    expect((put.body as { expectedVersion: number }).expectedVersion).toBe(1);
  });

  it('raises ApiError with the service error code', async () => {
    const server = new FakeServer();
    server.failNextPutWith = 409;
    const api = new CanvasApi('', server.fetch);
    const view = await api.getComposition('comp-1');
    await expect(
      api.updateComposition('comp-1', view.graph, view.version),
    ).rejects.toMatchObject({ code: 'VersionConflict', status: 409 });
    try {
      server.failNextPutWith = 409;
      await api.updateComposition('comp-1', view.graph, view.version);
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
    }
  });

  it('builds the export download URL', () => {
    const api = new CanvasApi('http://service.test');
    expect(api.exportUrl('comp-9')).toBe(
      'http://service.test/compositions/comp-9/export',
    );
  });
});
