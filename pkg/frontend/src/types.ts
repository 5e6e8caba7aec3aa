/** JSON wire types of the search service, field-for-field. */

export type GalleryMode = "album" | "boon" | "google";

export interface NormalizedQuery {
  original_text: string;
  english_text: string;
  detected_lang: string;
  was_translated: boolean;
  was_summarized: boolean;
  token_count: number;
}

export interface ImageHit {
  item_id: string;
  uri: string;
  score: number;
  rank: number;
}

export interface DescriptionHit {
  item_id: string;
  score: number;
  rank: number;
  text: string;
  image_id: string;
  image_uri: string;
}

export interface TextSearchResponse {
  query: NormalizedQuery;
  mode: string;
  hits: ImageHit[];
}

export interface ImageSearchResponse {
  hits: DescriptionHit[];
}

export interface ChatResponse {
  session_id: string;
  reply: string;
  descriptions: string[];
}

export interface GalleryItem {
  item_id: string;
  uri: string;
}

export interface GalleryPage {
  mode: string;
  page: number;
  page_size: number;
  total: number;
  items: GalleryItem[];
}

export interface TokenResponse {
  token: string;
  username: string;
}

export interface AlbumUploadResponse {
  item_id: string;
  uri: string;
  count: number;
}

export interface ErrorBody {
  detail: string;
  machine_code: string;
}
