/** Canvas state and editing operations.
 *
 * Every edit goes through the composition PUT carrying the version we
 * loaded (optimistic concurrency); a conflict surfaces as a
 * reload-and-retry prompt. Node positions are view-local: the wire
 * format never carries them, which is what makes the pointer and
 * keyboard paths produce byte-identical API call sequences.
 */

import type { CanvasApi } from './api.js';
import { ApiError } from './api.js';
import type {
  EdgeDocument,
  GraphDocument,
  Point,
  ValidationReport,
} from './types.js';

export interface CanvasViewState {
  graph: GraphDocument;
  version: number;
  positions: Map<string, Point>;
  selection: string | null;
  pendingEdgeSource: string | null;
  report: ValidationReport | null;
}

export interface CanvasEvents {
  onChange?: (state: CanvasViewState) => void;
  onReport?: (report: ValidationReport) => void;
  onVersionConflict?: () => void;
}

let fallbackCounter = 0;

function defaultIdGen(): string {
  fallbackCounter += 1;
  return `node-${Date.now().toString(36)}-${fallbackCounter}`;
}

export class CanvasController {
  readonly state: CanvasViewState;

  constructor(
    private readonly api: CanvasApi,
    private readonly compositionId: string,
    private readonly editorId: string,
    private readonly events: CanvasEvents = {},
    private readonly idGen: () => string = defaultIdGen,
  ) {
    this.state = {
      graph: { compositionId, startNodeId: '', nodes: [], edges: [] },
      version: 0,
      positions: new Map(),
      selection: null,
      pendingEdgeSource: null,
      report: null,
    };
  }

  async load(): Promise<void> {
    const view = await this.api.getComposition(this.compositionId);
    this.state.graph = view.graph;
    this.state.version = view.version;
    for (const node of view.graph.nodes) {
      if (!this.state.positions.has(node.nodeId)) {
        this.state.positions.set(node.nodeId, { x: 80, y: 80 });
      }
    }
    this.events.onChange?.(this.state);
    await this.refreshReport();
  }

  async refreshReport(): Promise<void> {
    const report = await this.api.validateComposition(this.compositionId);
    this.state.report = report;
    this.events.onReport?.(report);
  }

  private async push(graph: GraphDocument): Promise<boolean> {
    try {
      const view = await this.api.updateComposition(
        this.compositionId,
        graph,
        this.state.version,
        this.editorId,
      );
      this.state.graph = view.graph;
      this.state.version = view.version;
      this.events.onChange?.(this.state);
      await this.refreshReport();
      return true;
    } catch (err) {
      if (err instanceof ApiError && err.code === 'VersionConflict') {
        this.events.onVersionConflict?.();
        return false;
      }
      throw err;
    }
  }

  /** Shared by the drag-drop and the add-button flows; the position only
   * feeds the local layout, never the API call. */
  async placeModule(moduleRef: string, at?: Point): Promise<string | null> {
    const nodeId = this.idGen();
    const graph: GraphDocument = {
      ...this.state.graph,
      nodes: [
        ...this.state.graph.nodes,
        { nodeId, moduleRef, displayLabel: null },
      ],
    };
    const placed = await this.push(graph);
    if (!placed) {
      return null;
    }
    this.state.positions.set(nodeId, at ?? this.nextFreeSlot());
    return nodeId;
  }

  private nextFreeSlot(): Point {
    const index = this.state.graph.nodes.length;
    return { x: 80 + (index % 4) * 160, y: 80 + Math.floor(index / 4) * 120 };
  }

  /** Create the arrow; a null condition is the default (else) edge. */
  async drawFlow(
    from: string,
    to: string,
    conditionSource: string | null,
  ): Promise<boolean> {
    const priority = this.nextPriority(from);
    const edge: EdgeDocument = { from, to, condition: conditionSource, priority };
    return this.push({
      ...this.state.graph,
      edges: [...this.state.graph.edges, edge],
    });
  }

  nextPriority(from: string): number {
    const used = this.state.graph.edges
      .filter((edge) => edge.from === from)
      .map((edge) => edge.priority);
    return used.length === 0 ? 0 : Math.max(...used) + 1;
  }

  async removeEdge(from: string, to: string, priority: number): Promise<boolean> {
    return this.push({
      ...this.state.graph,
      edges: this.state.graph.edges.filter(
        (edge) =>
          !(edge.from === from && edge.to === to && edge.priority === priority),
      ),
    });
  }

  async relabelNode(nodeId: string, label: string | null): Promise<boolean> {
    return this.push({
      ...this.state.graph,
      nodes: this.state.graph.nodes.map((node) =>
        node.nodeId === nodeId ? { ...node, displayLabel: label } : node,
      ),
    });
  }

  // -- gesture adapters: both input paths funnel into the same calls --

  /** Pointer path: palette drag ends with a drop on the canvas. */
  async dropFromPalette(moduleRef: string, at: Point): Promise<string | null> {
    return this.placeModule(moduleRef, at);
  }

  /** Keyboard/button path: the add button plus a picker choice. */
  async addViaButton(moduleRef: string): Promise<string | null> {
    return this.placeModule(moduleRef);
  }

  /** Pointer path for arrows: press on the source, release on the target. */
  beginArrowDrag(from: string): void {
    this.state.pendingEdgeSource = from;
  }

  async releaseArrowAt(
    to: string,
    conditionSource: string | null,
  ): Promise<boolean> {
    const from = this.state.pendingEdgeSource;
    this.state.pendingEdgeSource = null;
    if (from === null) {
      return false;
    }
    return this.drawFlow(from, to, conditionSource);
  }

  /** Keyboard path for arrows: mark the source, then confirm the target. */
  markFlowSource(from: string): void {
    this.state.pendingEdgeSource = from;
  }

  async confirmFlowTarget(
    to: string,
    conditionSource: string | null,
  ): Promise<boolean> {
    return this.releaseArrowAt(to, conditionSource);
  }

  select(nodeId: string | null): void {
    this.state.selection = nodeId;
    this.events.onChange?.(this.state);
  }

  moveNode(nodeId: string, to: Point): void {
    this.state.positions.set(nodeId, to); // layout only, nothing to save
  }
}
