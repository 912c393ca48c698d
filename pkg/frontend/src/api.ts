// Typed client for the /v1 endpoints. Responses are parsed with the
// raw-preserving parser so number fields keep the service's exact bytes.

import { RawNum, arr, num, obj, parseWithRaw, str } from "./rawjson.js";

export interface AvatarEntry {
  index: number;
  name: string;
}

export interface RecommendationRow {
  avatar: string;
  winProbability: RawNum;
  biasDelta: RawNum;
  synergyDelta: RawNum;
  oppositionDelta: RawNum;
  similarFamiliar: { avatar: string; score: RawNum }[];
}

export interface RecommendResponse {
  recommendations: RecommendationRow[];
  familiarBest: RecommendationRow | null;
  body: string;
}

export interface PairScores {
  a: string;
  b: string;
  synergy: RawNum;
  opposition: RawNum;
  cosine: RawNum;
  body: string;
}

export interface RecommendQuery {
  ally: string[];
  enemy: string[];
  familiar?: string[];
  pool?: string[];
  topK?: number;
  simK?: number;
}

export class ServiceError extends Error {
  constructor(readonly code: string, message: string, readonly status: number) {
    super(message);
  }
}

interface MinimalResponse {
  status: number;
  text(): Promise<string>;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<MinimalResponse>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<string> {
    let response: MinimalResponse;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new ServiceError("unreachable", `service unreachable: ${String(err)}`, 0);
    }
    const body = await response.text();
    if (response.status < 200 || response.status >= 300) {
      let code = "http_error";
      let message = `status ${response.status}`;
      try {
        const parsed = obj(parseWithRaw(body), "error");
        code = str(parsed["code"], "code");
        message = str(parsed["message"], "message");
      } catch {
        // body was not the structured error shape; keep the generic message
      }
      throw new ServiceError(code, message, response.status);
    }
    return body;
  }

  async avatars(): Promise<AvatarEntry[]> {
    const body = await this.request("/v1/avatars");
    return arr(parseWithRaw(body), "avatars").map((entry, i) => {
      const row = obj(entry, `avatars[${i}]`);
      return { index: num(row["index"], "index").value, name: str(row["name"], "name") };
    });
  }

  async predict(red: string[], blue: string[]): Promise<{ pRedWin: RawNum; body: string }> {
    const body = await this.request("/v1/predict", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ red, blue }),
    });
    return { pRedWin: num(obj(parseWithRaw(body), "predict")["p_red_win"], "p_red_win"), body };
  }

  async recommend(query: RecommendQuery): Promise<RecommendResponse> {
    const payload: Record<string, unknown> = {
      ally: query.ally,
      enemy: query.enemy,
      top_k: query.topK ?? 5,
      sim_k: query.simK ?? 3,
    };
    if (query.familiar !== undefined) payload["familiar"] = query.familiar;
    if (query.pool !== undefined) payload["pool"] = query.pool;
    const body = await this.request("/v1/recommend", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    const root = obj(parseWithRaw(body), "recommend");
    const rows = arr(root["recommendations"], "recommendations").map((entry, i) =>
      parseRecommendation(obj(entry, `recommendations[${i}]`)));
    const bestRaw = root["familiar_best"];
    const familiarBest = bestRaw === null || bestRaw === undefined
      ? null
      : parseRecommendation(obj(bestRaw, "familiar_best"));
    return { recommendations: rows, familiarBest, body };
  }

  async pair(a: string, b: string): Promise<PairScores> {
    const q = `/v1/pair?a=${encodeURIComponent(a)}&b=${encodeURIComponent(b)}`;
    const body = await this.request(q);
    const root = obj(parseWithRaw(body), "pair");
    return {
      a: str(root["a"], "a"),
      b: str(root["b"], "b"),
      synergy: num(root["synergy"], "synergy"),
      opposition: num(root["opposition"], "opposition"),
      cosine: num(root["cosine"], "cosine"),
      body,
    };
  }
}

function parseRecommendation(row: { [key: string]: import("./rawjson.js").RawValue }): RecommendationRow {
  return {
    avatar: str(row["avatar"], "avatar"),
    winProbability: num(row["win_probability"], "win_probability"),
    biasDelta: num(row["bias_delta"], "bias_delta"),
    synergyDelta: num(row["synergy_delta"], "synergy_delta"),
    oppositionDelta: num(row["opposition_delta"], "opposition_delta"),
    similarFamiliar: arr(row["similar_familiar"], "similar_familiar").map((e, i) => {
      const entry = obj(e, `similar_familiar[${i}]`);
      return { avatar: str(entry["avatar"], "avatar"), score: num(entry["score"], "score") };
    }),
  };
}
