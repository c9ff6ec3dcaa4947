export interface AnalyzeResponse {
  report_id: string;
  per_algorithm: Record<string, Record<string, number>>;
  consensus: Record<string, number>;
  top_genre: string;
  confidence_percent: number;
  tempo_bpm: number;
}

export interface UserLabel {
  genres: string[];
  submitted_at: string;
  note: string;
}

export interface HistoryEntry extends AnalyzeResponse {
  created_at: string;
  source_name: string;
  user_labels: UserLabel[];
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export const ALGORITHM_ORDER = ["knn", "gnb", "tree", "forest", "mlp"] as const;

export const ALGORITHM_TITLES: Record<string, string> = {
  knn: "k-Nearest Neighbour",
  gnb: "Naive Bayes",
  tree: "Decision Tree",
  forest: "Random Forest",
  mlp: "Neural Network",
  consensus: "Consensus",
};
