/** Wire documents exchanged with the service API. */

export interface NodeDocument {
  nodeId: string;
  moduleRef: string;
  displayLabel: string | null;
}

export interface EdgeDocument {
  from: string;
  to: string;
  condition: string | null;
  priority: number;
}

export interface GraphDocument {
  compositionId: string;
  startNodeId: string;
  nodes: NodeDocument[];
  edges: EdgeDocument[];
}

export interface CompositionView {
  module: ModuleView | null;
  graph: GraphDocument;
  version: number;
}

export interface ModuleView {
  moduleId: string;
  kind: 'atomic' | 'composite';
  title: string;
  authorId: string;
  contentRef: string;
  licence: string;
  version: number;
  parentId: string | null;
  likes?: number;
  favourite?: boolean;
  empty?: boolean;
}

export interface ValidationIssue {
  code: 'NeverEnds' | 'UnknownModuleRef' | 'NoDefaultEdge' | 'UnreachableNode' | 'Revisit';
  subject: string[];
  message: string;
}

export interface ValidationReport {
  errors: ValidationIssue[];
  warnings: ValidationIssue[];
}

export interface SearchResponse {
  results: ModuleView[];
  createNew: boolean;
}

export interface ChatTemplate {
  templateId: string;
  slots: string[];
  preview: string;
}

export interface ChatCatalog {
  locales: string[];
  templates: ChatTemplate[];
}

export interface RewardsView {
  userId: string;
  totalPoints: number;
  badges: { badgeId: string; label: string; awardedAt: string }[];
  perModule: Record<string, { reuses: number; remixes: number }>;
}

export interface ParseResponse {
  ok: boolean;
  canonical?: string;
  diagnostic?: { line: number; column: number; message: string; expected: string | null };
}

export interface Point {
  x: number;
  y: number;
}
