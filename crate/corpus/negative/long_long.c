int main() { long long x = 0; }
