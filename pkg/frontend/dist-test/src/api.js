"use strict";
// Typed client for the /v1 endpoints. Responses are parsed with the
// raw-preserving parser so number fields keep the service's exact bytes.
Object.defineProperty(exports, "__esModule", { value: true });
exports.ApiClient = exports.ServiceError = void 0;
const rawjson_js_1 = require("./rawjson.js");
class ServiceError extends Error {
    constructor(code, message, status) {
        super(message);
        this.code = code;
        this.status = status;
    }
}
exports.ServiceError = ServiceError;
class ApiClient {
    constructor(baseUrl, fetchImpl = (url, init) => fetch(url, init)) {
        this.baseUrl = baseUrl;
        this.fetchImpl = fetchImpl;
    }
    async request(path, init) {
        let response;
        try {
            response = await this.fetchImpl(this.baseUrl + path, init);
        }
        catch (err) {
            throw new ServiceError("unreachable", `service unreachable: ${String(err)}`, 0);
        }
        const body = await response.text();
        if (response.status < 200 || response.status >= 300) {
            let code = "http_error";
            let message = `status ${response.status}`;
            try {
                const parsed = (0, rawjson_js_1.obj)((0, rawjson_js_1.parseWithRaw)(body), "error");
                code = (0, rawjson_js_1.str)(parsed["code"], "code");
                message = (0, rawjson_js_1.str)(parsed["message"], "message");
            }
            catch {
                // body was not the structured error shape; keep the generic message
            }
            throw new ServiceError(code, message, response.status);
        }
        return body;
    }
    async avatars() {
        const body = await this.request("/v1/avatars");
        return (0, rawjson_js_1.arr)((0, rawjson_js_1.parseWithRaw)(body), "avatars").map((entry, i) => {
            const row = (0, rawjson_js_1.obj)(entry, `avatars[${i}]`);
            return { index: (0, rawjson_js_1.num)(row["index"], "index").value, name: (0, rawjson_js_1.str)(row["name"], "name") };
        });
    }
    async predict(red, blue) {
        const body = await this.request("/v1/predict", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ red, blue }),
        });
        return { pRedWin: (0, rawjson_js_1.num)((0, rawjson_js_1.obj)((0, rawjson_js_1.parseWithRaw)(body), "predict")["p_red_win"], "p_red_win"), body };
    }
    async recommend(query) {
        const payload = {
            ally: query.ally,
            enemy: query.enemy,
            top_k: query.topK ?? 5,
            sim_k: query.simK ?? 3,
        };
        if (query.familiar !== undefined)
            payload["familiar"] = query.familiar;
        if (query.pool !== undefined)
            payload["pool"] = query.pool;
        const body = await this.request("/v1/recommend", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(payload),
        });
        const root = (0, rawjson_js_1.obj)((0, rawjson_js_1.parseWithRaw)(body), "recommend");
        const rows = (0, rawjson_js_1.arr)(root["recommendations"], "recommendations").map((entry, i) => parseRecommendation((0, rawjson_js_1.obj)(entry, `recommendations[${i}]`)));
        const bestRaw = root["familiar_best"];
        const familiarBest = bestRaw === null || bestRaw === undefined
            ? null
            : parseRecommendation((0, rawjson_js_1.obj)(bestRaw, "familiar_best"));
        return { recommendations: rows, familiarBest, body };
    }
    async pair(a, b) {
        const q = `/v1/pair?a=${encodeURIComponent(a)}&b=${encodeURIComponent(b)}`;
        const body = await this.request(q);
        const root = (0, rawjson_js_1.obj)((0, rawjson_js_1.parseWithRaw)(body), "pair");
        return {
            a: (0, rawjson_js_1.str)(root["a"], "a"),
            b: (0, rawjson_js_1.str)(root["b"], "b"),
            synergy: (0, rawjson_js_1.num)(root["synergy"], "synergy"),
            opposition: (0, rawjson_js_1.num)(root["opposition"], "opposition"),
            cosine: (0, rawjson_js_1.num)(root["cosine"], "cosine"),
            body,
        };
    }
}
exports.ApiClient = ApiClient;
function parseRecommendation(row) {
    return {
        avatar: (0, rawjson_js_1.str)(row["avatar"], "avatar"),
        winProbability: (0, rawjson_js_1.num)(row["win_probability"], "win_probability"),
        biasDelta: (0, rawjson_js_1.num)(row["bias_delta"], "bias_delta"),
        synergyDelta: (0, rawjson_js_1.num)(row["synergy_delta"], "synergy_delta"),
        oppositionDelta: (0, rawjson_js_1.num)(row["opposition_delta"], "opposition_delta"),
        similarFamiliar: (0, rawjson_js_1.arr)(row["similar_familiar"], "similar_familiar").map((e, i) => {
            const entry = (0, rawjson_js_1.obj)(e, `similar_familiar[${i}]`);
            return { avatar: (0, rawjson_js_1.str)(entry["avatar"], "avatar"), score: (0, rawjson_js_1.num)(entry["score"], "score") };
        }),
    };
}
